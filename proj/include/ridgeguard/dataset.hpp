#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ridgeguard/types.hpp"

namespace ridgeguard {

struct Impression {
  MinutiaeSet minutiae;
  SkeletonImage skeleton;
};

struct Subject {
  std::string id;
  std::vector<Impression> impressions;
};

struct Dataset {
  std::vector<Subject> subjects;

  /// Impression count per subject, in subject order.
  std::vector<std::size_t> shape() const;
};

/// Writes `<dir>/<subject>/<impression>.min` and `.pgm` for every impression.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// Reads the layout written by save_dataset. Subjects and impressions are
/// ordered by name. Every layout problem found is listed in one
/// ValidationError, one path per line.
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace ridgeguard
