#include <texcls/dataset.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <texcls/error.hpp>
#include <texcls/rng.hpp>

namespace fs = std::filesystem;

namespace texcls {

namespace {

const std::set<std::string> kImageExtensions = {".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff",
                                                ".pgm", ".ppm", ".pnm", ".pbm"};

bool looks_like_image(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return kImageExtensions.contains(ext);
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, delim)) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
            field.pop_back();
        }
        std::size_t start = field.find_first_not_of(' ');
        out.push_back(start == std::string::npos ? std::string{} : field.substr(start));
    }
    return out;
}

std::vector<ImageSample> load_manifest(const fs::path& manifest) {
    std::ifstream in(manifest);
    if (!in) {
        throw ConfigError("cannot open manifest " + manifest.string());
    }
    std::string header;
    std::getline(in, header);
    const auto cols = split_fields(header, ',');
    if (cols != std::vector<std::string>{"id", "label", "path"}) {
        throw DataError("manifest " + manifest.string() + ": header must be id,label,path");
    }
    const fs::path base = manifest.parent_path();
    std::vector<ImageSample> samples;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto f = split_fields(line, ',');
        if (f.size() != 3 || f[0].empty() || f[1].empty() || f[2].empty()) {
            throw DataError("manifest " + manifest.string() + ":" + std::to_string(line_no) +
                            ": expected three non-empty fields");
        }
        if (!seen.insert(f[0]).second) {
            throw DataError("manifest " + manifest.string() + ": duplicate id " + f[0]);
        }
        fs::path p = f[2];
        if (p.is_relative()) {
            p = base / p;
        }
        ImageSample s{f[0], f[1], load_image(p)};
        validate_sample(s);
        samples.push_back(std::move(s));
    }
    if (samples.empty()) {
        throw DataError("manifest " + manifest.string() + " lists no samples");
    }
    return samples;
}

} // namespace

void validate_sample(const ImageSample& sample) {
    if (sample.label.empty()) {
        throw DataError("sample " + sample.id + ": empty label");
    }
    if (sample.pixels.rows() < kMinImageSide || sample.pixels.cols() < kMinImageSide) {
        throw DataError("sample " + sample.id + ": image smaller than 16x16");
    }
    for (double v : sample.pixels.values()) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw DataError("sample " + sample.id + ": intensity outside [0,1]");
        }
    }
}

IntensityGrid load_image(const fs::path& file) {
    const cv::Mat img = cv::imread(file.string(), cv::IMREAD_UNCHANGED);
    if (img.empty()) {
        throw DataError("cannot decode image " + file.string());
    }
    if (img.depth() != CV_8U) {
        throw DataError("unsupported bit depth (need 8-bit) in " + file.string());
    }
    const int ch = img.channels();
    if (ch != 1 && ch != 3 && ch != 4) {
        throw DataError("unsupported channel count in " + file.string());
    }
    IntensityGrid out(static_cast<std::size_t>(img.rows), static_cast<std::size_t>(img.cols));
    for (int r = 0; r < img.rows; ++r) {
        const std::uint8_t* row = img.ptr<std::uint8_t>(r);
        for (int c = 0; c < img.cols; ++c) {
            double v;
            if (ch == 1) {
                v = row[c];
            } else {
                // OpenCV stores BGR(A).
                const std::uint8_t* px = row + static_cast<std::ptrdiff_t>(c) * ch;
                v = 0.299 * px[2] + 0.587 * px[1] + 0.114 * px[0];
            }
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = std::clamp(v / 255.0, 0.0, 1.0);
        }
    }
    return out;
}

std::vector<ImageSample> load_dataset(const fs::path& root) {
    std::error_code ec;
    if (!fs::exists(root, ec)) {
        throw ConfigError("dataset root does not exist: " + root.string());
    }
    if (fs::is_regular_file(root)) {
        return load_manifest(root);
    }
    if (fs::is_regular_file(root / "manifest.csv")) {
        return load_manifest(root / "manifest.csv");
    }

    std::vector<fs::path> classes;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_directory()) {
            classes.push_back(entry.path());
        }
    }
    std::sort(classes.begin(), classes.end());
    if (classes.empty()) {
        throw DataError("dataset root has no class directories: " + root.string());
    }

    std::vector<ImageSample> samples;
    for (const auto& dir : classes) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && looks_like_image(entry.path())) {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            throw DataError("class directory has no images: " + dir.string());
        }
        const std::string label = dir.filename().string();
        for (const auto& f : files) {
            ImageSample s{fs::relative(f, root).generic_string(), label, load_image(f)};
            validate_sample(s);
            samples.push_back(std::move(s));
        }
    }
    return samples;
}

std::uint64_t dataset_digest(std::span<const ImageSample> samples) {
    Fnv1a h;
    h.update_u64(samples.size());
    for (const auto& s : samples) {
        h.update(s.id);
        h.update(s.label);
        h.update_u64(s.pixels.rows());
        h.update_u64(s.pixels.cols());
        for (double v : s.pixels.values()) {
            h.update_double(v);
        }
    }
    return h.digest();
}

QuantizedImage quantize(const IntensityGrid& pixels, int levels) {
    if (levels < 2 || levels > 256) {
        throw ParameterError("quantize: levels must be in [2, 256], got " + std::to_string(levels));
    }
    QuantizedImage q{levels, Grid<std::uint16_t>(pixels.rows(), pixels.cols())};
    auto dst = q.data.values();
    auto src = pixels.values();
    const double top = levels - 1;
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double bin = std::floor(std::clamp(src[i], 0.0, 1.0) * levels);
        dst[i] = static_cast<std::uint16_t>(std::min(bin, top));
    }
    return q;
}

QuantizedImage quantize(const ImageSample& sample, int levels) { return quantize(sample.pixels, levels); }

std::size_t train_size(std::size_t n, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ParameterError("train fraction must lie in (0, 1)");
    }
    if (n < 2) {
        throw DataError("need at least two samples to split");
    }
    const auto t = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n) + 0.5));
    return std::clamp<std::size_t>(t, 1, n - 1);
}

Split permute_split(std::span<const std::string> labels, const SplitSpec& spec) {
    const std::set<std::string> classes(labels.begin(), labels.end());
    if (classes.size() < 2) {
        throw DataError("split needs at least two classes");
    }
    const std::size_t n_train = train_size(labels.size(), spec.train_fraction);

    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    Rng rng(spec.seed);
    portable_shuffle(std::span<std::size_t>(order), rng);

    Split split;
    split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

    std::set<std::string> in_train;
    for (auto i : split.train) {
        in_train.insert(labels[i]);
    }
    if (in_train.size() != classes.size()) {
        for (const auto& c : classes) {
            if (!in_train.contains(c)) {
                throw DataError("split with seed " + std::to_string(spec.seed) + " leaves class '" + c +
                                "' out of the training set");
            }
        }
    }
    return split;
}

Split permute_split(std::span<const ImageSample> samples, const SplitSpec& spec) {
    std::vector<std::string> labels;
    labels.reserve(samples.size());
    for (const auto& s : samples) {
        labels.push_back(s.label);
    }
    return permute_split(labels, spec);
}

} // namespace texcls
