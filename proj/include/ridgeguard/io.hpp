#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "ridgeguard/types.hpp"

namespace ridgeguard {

inline constexpr int kTemplateFormatVersion = 1;

/// Reads whitespace-delimited `x y theta` lines; `#` starts a comment.
MinutiaeSet parse_minutiae(std::istream& in, std::string subject_id = {},
                           std::string impression_id = {});
MinutiaeSet parse_minutiae(std::string_view text);
void write_minutiae(std::ostream& out, const MinutiaeSet& ms);

/// Accepts P1/P4 bitmaps (1 = ridge) and P2/P5 graymaps (dark = ridge).
SkeletonImage parse_skeleton(std::istream& in);
SkeletonImage parse_skeleton(std::string_view bytes);
/// Writes binary P5 with ridge pixels black (0) on white (255).
void write_pgm(std::ostream& out, const SkeletonImage& skel);

std::string serialize_template(const ProtectedTemplate& tpl);
ProtectedTemplate deserialize_template(std::string_view json_text);

MinutiaeSet load_minutiae(const std::filesystem::path& path);
SkeletonImage load_skeleton(const std::filesystem::path& path);
ProtectedTemplate load_template(const std::filesystem::path& path);
void save_template(const std::filesystem::path& path, const ProtectedTemplate& tpl);

std::string read_file(const std::filesystem::path& path);
/// Throws Error when the file cannot be created.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace ridgeguard
