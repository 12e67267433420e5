#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace mochlab::cli {

std::string sha256_hex(std::string_view bytes);

/// Output directory plus an inventory of everything written into it.
class ArtifactSet {
 public:
  explicit ArtifactSet(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  void write(const std::string& name, std::string_view bytes);
  /// manifest.json: config echo, versions, wall-clock seconds and checksums.
  void write_manifest(const nlohmann::json& config, double wall_seconds);

 private:
  struct Entry {
    std::string name;
    std::size_t bytes;
    std::string sha256;
  };
  std::filesystem::path dir_;
  std::vector<Entry> files_;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Self-contained line plot; no timestamps or other run-dependent metadata.
std::string render_svg(const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace mochlab::cli
