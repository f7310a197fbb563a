#include "ridgeguard/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "ridgeguard/error.hpp"
#include "ridgeguard/io.hpp"

namespace ridgeguard {

namespace fs = std::filesystem;

std::vector<std::size_t> Dataset::shape() const {
  std::vector<std::size_t> out;
  out.reserve(subjects.size());
  for (const auto& s : subjects) out.push_back(s.impressions.size());
  return out;
}

void save_dataset(const Dataset& dataset, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& subject : dataset.subjects) {
    const fs::path sub = dir / subject.id;
    fs::create_directories(sub);
    for (const auto& imp : subject.impressions) {
      std::ostringstream minutiae, image;
      write_minutiae(minutiae, imp.minutiae);
      write_pgm(image, imp.skeleton);
      write_file(sub / (imp.minutiae.impression_id + ".min"), minutiae.str());
      write_file(sub / (imp.minutiae.impression_id + ".pgm"), image.str());
    }
  }
}

Dataset load_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("dataset directory not found: " + dir.string());

  std::vector<std::string> problems;
  std::vector<fs::path> subject_dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) {
      subject_dirs.push_back(entry.path());
    } else {
      problems.push_back(entry.path().string() + ": expected a subject directory");
    }
  }
  std::sort(subject_dirs.begin(), subject_dirs.end());

  Dataset dataset;
  for (const auto& sub : subject_dirs) {
    std::map<std::string, std::pair<bool, bool>> stems;  // (.min, .pgm) present
    for (const auto& entry : fs::directory_iterator(sub)) {
      const auto ext = entry.path().extension().string();
      if (!entry.is_regular_file() || (ext != ".min" && ext != ".pgm")) {
        problems.push_back(entry.path().string() + ": expected <impression>.min or .pgm");
        continue;
      }
      auto& flags = stems[entry.path().stem().string()];
      (ext == ".min" ? flags.first : flags.second) = true;
    }
    if (stems.empty()) problems.push_back(sub.string() + ": subject has no impressions");

    Subject subject{sub.filename().string(), {}};
    for (const auto& [stem, flags] : stems) {
      if (!flags.first) problems.push_back((sub / (stem + ".min")).string() + ": missing");
      if (!flags.second) problems.push_back((sub / (stem + ".pgm")).string() + ": missing");
      if (!flags.first || !flags.second) continue;
      try {
        Impression imp{load_minutiae(sub / (stem + ".min")), load_skeleton(sub / (stem + ".pgm"))};
        subject.impressions.push_back(std::move(imp));
      } catch (const Error& e) {
        problems.push_back((sub / stem).string() + ": " + e.what());
      }
    }
    dataset.subjects.push_back(std::move(subject));
  }

  if (!problems.empty()) {
    std::string message = "dataset layout violations:";
    for (const auto& p : problems) message += "\n  " + p;
    throw ValidationError(message);
  }
  return dataset;
}

}  // namespace ridgeguard
