#include "rangeseg/io_formats.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "rangeseg/errors.hpp"

namespace rangeseg {

namespace {

static_assert(std::endian::native == std::endian::little, "readers assume a little-endian host");

std::vector<char> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const std::streamoff size = in.tellg();
    if (size < 0) throw DataError("cannot read " + path.string());
    in.seekg(0, std::ios::beg);
    std::vector<char> bytes(static_cast<std::size_t>(size));
    if (size > 0 && !in.read(bytes.data(), size)) throw DataError("short read on " + path.string());
    return bytes;
}

void check_record_size(const std::filesystem::path& path, std::size_t bytes, std::size_t record) {
    if (bytes % record != 0) {
        const std::size_t offset = bytes - bytes % record;
        throw DataError(path.string() + ": truncated record at byte offset " + std::to_string(offset) + " (file is " +
                        std::to_string(bytes) + " bytes, records are " + std::to_string(record) + " bytes)");
    }
}

void write_all(const std::filesystem::path& path, const void* data, std::size_t bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!out) throw DataError("write failed on " + path.string());
}

std::vector<std::uint32_t> read_words(const std::filesystem::path& path, std::size_t expected_count) {
    const auto bytes = read_all(path);
    check_record_size(path, bytes.size(), 4);
    const std::size_t count = bytes.size() / 4;
    if (count != expected_count) {
        throw DataError(path.string() + ": " + std::to_string(count) + " labels but the scan has " +
                        std::to_string(expected_count) + " points");
    }
    std::vector<std::uint32_t> words(count);
    if (count > 0) std::memcpy(words.data(), bytes.data(), bytes.size());
    return words;
}

std::uint32_t mix(std::uint32_t x) {
    x ^= x >> 16;
    x *= 0x7feb352dU;
    x ^= x >> 15;
    x *= 0x846ca68bU;
    x ^= x >> 16;
    return x;
}

}  // namespace

PointCloud read_velodyne_bin(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    check_record_size(path, bytes.size(), 16);
    if (bytes.empty()) std::cerr << "warning: " << path.string() << " is empty\n";
    const std::size_t n = bytes.size() / 16;
    PointCloud cloud(n);
    for (std::size_t i = 0; i < n; ++i) {
        float xyzi[4];
        std::memcpy(xyzi, bytes.data() + i * 16, 16);
        cloud[i] = {xyzi[0], xyzi[1], xyzi[2]};
    }
    return cloud;
}

void write_velodyne_bin(const std::filesystem::path& path, std::span<const Point3f> cloud) {
    std::vector<float> buf;
    buf.reserve(cloud.size() * 4);
    for (const auto& p : cloud) {
        buf.insert(buf.end(), {p.x, p.y, p.z, 0.0f});
    }
    write_all(path, buf.data(), buf.size() * sizeof(float));
}

std::vector<GtLabel> read_semantickitti_label(const std::filesystem::path& path, std::size_t expected_count) {
    const auto words = read_words(path, expected_count);
    std::vector<GtLabel> labels(words.size());
    std::transform(words.begin(), words.end(), labels.begin(), GtLabel::from_word);
    return labels;
}

void write_semantickitti_label(const std::filesystem::path& path, std::span<const GtLabel> labels) {
    std::vector<std::uint32_t> words(labels.size());
    std::transform(labels.begin(), labels.end(), words.begin(), [](const GtLabel& l) { return l.word(); });
    write_all(path, words.data(), words.size() * 4);
}

void write_instance_labels(const std::filesystem::path& path, std::span<const std::int32_t> labels) {
    std::vector<GtLabel> words(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] > 0xFFFF) {
            throw DataError("instance label " + std::to_string(labels[i]) + " does not fit 16 bits");
        }
        words[i] = {0, static_cast<std::uint16_t>(labels[i])};
    }
    write_semantickitti_label(path, words);
}

std::vector<std::int32_t> read_instance_labels(const std::filesystem::path& path, std::size_t expected_count) {
    const auto words = read_words(path, expected_count);
    std::vector<std::int32_t> labels(words.size());
    std::transform(words.begin(), words.end(), labels.begin(), [](std::uint32_t w) { return std::int32_t(w >> 16); });
    return labels;
}

Rgb label_color(std::int32_t label) {
    if (label == 0) return kBackgroundColor;
    const std::uint32_t h = mix(static_cast<std::uint32_t>(label) * 0x9E3779B9U + 1U);
    Rgb c{static_cast<std::uint8_t>(h), static_cast<std::uint8_t>(h >> 8), static_cast<std::uint8_t>(h >> 16)};
    if (c == kBackgroundColor) c[0] ^= 0x80;
    return c;
}

void write_colored_ply(const std::filesystem::path& path, std::span<const Point3f> cloud,
                       std::span<const std::int32_t> labels) {
    if (cloud.size() != labels.size()) {
        throw DataError("write_colored_ply: " + std::to_string(cloud.size()) + " points but " +
                        std::to_string(labels.size()) + " labels");
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << "ply\nformat ascii 1.0\nelement vertex " << cloud.size()
        << "\nproperty float x\nproperty float y\nproperty float z\n"
           "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
    out << std::setprecision(9);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Rgb c = label_color(labels[i]);
        out << cloud[i].x << ' ' << cloud[i].y << ' ' << cloud[i].z << ' ' << int(c[0]) << ' ' << int(c[1]) << ' '
            << int(c[2]) << '\n';
    }
    if (!out) throw DataError("write failed on " + path.string());
}

std::set<std::uint16_t> load_ground_classes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open ground class file " + path.string());
    try {
        const auto doc = nlohmann::json::parse(in);
        std::set<std::uint16_t> ids;
        for (const auto& [name, id] : doc.at("ground_classes").items()) ids.insert(id.get<std::uint16_t>());
        return ids;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed ground class file " + path.string() + ": " + e.what());
    }
}

std::filesystem::path default_ground_classes_path() {
    return std::filesystem::path(RANGESEG_DATA_DIR) / "semantickitti_ground_classes.json";
}

SequenceFiles list_sequence(const std::filesystem::path& dataset_root, const std::string& sequence) {
    namespace fs = std::filesystem;
    fs::path seq = dataset_root / "sequences" / sequence;
    if (!fs::is_directory(seq / "velodyne")) throw DataError("missing " + (seq / "velodyne").string());
    SequenceFiles files;
    for (const auto& entry : fs::directory_iterator(seq / "velodyne")) {
        if (entry.path().extension() == ".bin") files.scans.push_back(entry.path());
    }
    std::sort(files.scans.begin(), files.scans.end());
    for (const auto& scan : files.scans) {
        fs::path label = seq / "labels" / scan.filename().replace_extension(".label");
        files.labels.push_back(fs::exists(label) ? std::optional(label) : std::nullopt);
    }
    return files;
}

}  // namespace rangeseg
