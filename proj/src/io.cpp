#include "ridgeguard/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "ridgeguard/error.hpp"

namespace ridgeguard {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view token, T& value) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

// Cursor over a PNM byte buffer.
class PnmReader {
 public:
  explicit PnmReader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view magic() {
    if (bytes_.size() < 2) throw ParseError("truncated image header");
    pos_ = 2;
    return bytes_.substr(0, 2);
  }

  long header_int() {
    skip_space_and_comments();
    std::size_t start = pos_;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("malformed image header");
    long v = 0;
    if (!parse_number(bytes_.substr(start, pos_ - start), v)) {
      throw ParseError("malformed image header");
    }
    return v;
  }

  // The single whitespace byte separating a binary header from its raster.
  void end_binary_header() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw ParseError("truncated image header");
    }
    ++pos_;
  }

  std::string_view take(std::size_t count) {
    if (bytes_.size() - pos_ < count) throw ParseError("truncated image payload");
    auto out = bytes_.substr(pos_, count);
    pos_ += count;
    return out;
  }

  // Next ASCII '0'/'1' for P1, where digits need not be separated.
  int bit() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) throw ParseError("truncated image payload");
    char c = bytes_[pos_++];
    if (c != '0' && c != '1') throw ParseError("invalid P1 pixel value");
    return c - '0';
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

bool gray_is_ridge(long value, long maxval) {
  // Scaled to 8 bits: <= 127 is ridge.
  return value * 255 <= 127 * maxval;
}

}  // namespace

MinutiaeSet parse_minutiae(std::istream& in, std::string subject_id, std::string impression_id) {
  MinutiaeSet ms;
  ms.subject_id = std::move(subject_id);
  ms.impression_id = std::move(impression_id);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;

    std::string_view tokens[4];
    int count = 0;
    while (!view.empty() && count < 4) {
      auto end = view.find_first_of(" \t\r\v\f");
      tokens[count++] = view.substr(0, end);
      view = end == std::string_view::npos ? std::string_view{} : trim(view.substr(end));
    }
    if (count != 3 || !view.empty()) {
      throw ParseError("expected `x y theta`", line_no);
    }
    Minutia m;
    double theta = 0.0;
    if (!parse_number(tokens[0], m.x) || !parse_number(tokens[1], m.y) ||
        !parse_number(tokens[2], theta) || !std::isfinite(theta)) {
      throw ParseError("malformed minutia `" + line + "`", line_no);
    }
    if (m.x < 0 || m.y < 0) {
      throw ValidationError("line " + std::to_string(line_no) + ": negative coordinates");
    }
    m.theta = normalize_degrees(theta);
    ms.minutiae.push_back(m);
  }
  ms.validate();
  return ms;
}

MinutiaeSet parse_minutiae(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_minutiae(in);
}

void write_minutiae(std::ostream& out, const MinutiaeSet& ms) {
  out << "# x y theta\n";
  std::ostringstream buf;
  buf.precision(17);
  for (const auto& m : ms.minutiae) {
    buf.str({});
    buf << m.theta;
    out << m.x << ' ' << m.y << ' ' << buf.str() << '\n';
  }
}

SkeletonImage parse_skeleton(std::string_view bytes) {
  PnmReader reader(bytes);
  auto magic = reader.magic();
  if (magic != "P1" && magic != "P2" && magic != "P4" && magic != "P5") {
    throw ParseError("unsupported image magic `" + std::string(magic) + "`");
  }
  long w = reader.header_int();
  long h = reader.header_int();
  if (w <= 0 || h <= 0 || w > 1 << 16 || h > 1 << 16) throw ParseError("bad image dimensions");
  SkeletonImage skel(static_cast<int>(w), static_cast<int>(h));

  if (magic == "P1") {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) skel.set(x, y, reader.bit() == 1);
  } else if (magic == "P4") {
    reader.end_binary_header();
    std::size_t row_bytes = (static_cast<std::size_t>(w) + 7) / 8;
    for (int y = 0; y < h; ++y) {
      auto row = reader.take(row_bytes);
      for (int x = 0; x < w; ++x) {
        auto byte = static_cast<unsigned char>(row[static_cast<std::size_t>(x) / 8]);
        skel.set(x, y, (byte >> (7 - x % 8)) & 1);
      }
    }
  } else {
    long maxval = reader.header_int();
    if (maxval <= 0 || maxval > 65535) throw ParseError("bad PGM maxval");
    if (magic == "P2") {
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          long v = reader.header_int();
          if (v > maxval) throw ParseError("PGM sample exceeds maxval");
          skel.set(x, y, gray_is_ridge(v, maxval));
        }
    } else {
      reader.end_binary_header();
      std::size_t sample = maxval < 256 ? 1 : 2;
      auto raster = reader.take(static_cast<std::size_t>(w) * h * sample);
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          std::size_t at = (static_cast<std::size_t>(y) * w + x) * sample;
          long v = static_cast<unsigned char>(raster[at]);
          if (sample == 2) v = (v << 8) | static_cast<unsigned char>(raster[at + 1]);
          skel.set(x, y, gray_is_ridge(v, maxval));
        }
    }
  }
  return skel;
}

SkeletonImage parse_skeleton(std::istream& in) {
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_skeleton(std::string_view(bytes));
}

void write_pgm(std::ostream& out, const SkeletonImage& skel) {
  out << "P5\n" << skel.width << ' ' << skel.height << "\n255\n";
  std::string raster(skel.pixels.size(), '\xff');
  for (std::size_t i = 0; i < skel.pixels.size(); ++i) {
    if (skel.pixels[i]) raster[i] = '\0';
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
}

std::string serialize_template(const ProtectedTemplate& tpl) {
  tpl.validate();
  ordered_json j;
  j["version"] = kTemplateFormatVersion;
  j["key_id"] = tpl.key_id;
  j["s"] = tpl.params.s;
  j["b"] = tpl.params.b;
  j["t"] = tpl.params.t;
  j["n"] = tpl.ct.rows();
  auto rows = ordered_json::array();
  for (Eigen::Index i = 0; i < tpl.ct.rows(); ++i) {
    auto row = ordered_json::array();
    for (Eigen::Index k = 0; k < tpl.ct.cols(); ++k) row.push_back(tpl.ct(i, k));
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j.dump() + "\n";
}

ProtectedTemplate deserialize_template(std::string_view json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("template is not valid JSON: ") + e.what());
  }
  try {
    int version = j.at("version").get<int>();
    if (version != kTemplateFormatVersion) {
      throw FormatError("unsupported template version " + std::to_string(version));
    }
    ProtectedTemplate tpl;
    tpl.key_id = j.at("key_id").get<std::string>();
    tpl.params.s = j.at("s").get<int>();
    tpl.params.b = j.at("b").get<double>();
    tpl.params.t = j.at("t").get<int>();
    tpl.params.validate();
    auto n = j.at("n").get<std::int64_t>();
    const auto& rows = j.at("rows");
    if (!rows.is_array() || n < 0 || static_cast<std::size_t>(n) != rows.size()) {
      throw DimensionError("template header n does not match row count");
    }
    tpl.ct.resize(n, tpl.params.t);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(tpl.params.t)) {
        throw DimensionError("template row " + std::to_string(i) + " does not have t entries");
      }
      for (int k = 0; k < tpl.params.t; ++k) tpl.ct(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
    tpl.validate();
    return tpl;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed template: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("failed writing " + path.string());
}

MinutiaeSet load_minutiae(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_minutiae(in, path.parent_path().filename().string(), path.stem().string());
}

SkeletonImage load_skeleton(const std::filesystem::path& path) {
  return parse_skeleton(std::string_view(read_file(path)));
}

ProtectedTemplate load_template(const std::filesystem::path& path) {
  return deserialize_template(read_file(path));
}

void save_template(const std::filesystem::path& path, const ProtectedTemplate& tpl) {
  write_file(path, serialize_template(tpl));
}

}  // namespace ridgeguard
