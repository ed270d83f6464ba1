#pragma once

#include "multiwell/landscape.hpp"
#include "multiwell/langevin.hpp"
#include "multiwell/measures.hpp"
#include "multiwell/quasimodes.hpp"
#include "multiwell/spectral.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace mw::io {

using nlohmann::json;

/// Fixed 17-significant-digit float formatting for CSV cells.
std::string fmt(double v);

json to_json(const CriticalPoint& cp, int dim);
json to_json(const BarrierRecord& b, int dim);
json to_json(const AssumptionFlags& f);
json to_json(const LandscapeReport& r, int dim);
json to_json(const SpectralResult& r);
json to_json(const ComparisonReport& r);
json to_json(const WitnessReport& r);
json to_json(const ExitSummary& s);
json to_json(const TrajectoryStats& s, int dim);
json to_json(const AtomicMeasure& mu, int dim);
json grid_header(const Grid& g, double beta);

std::string comparison_csv(const std::vector<ComparisonReport>& sweep);
std::string witness_csv(const WitnessReport& report);
std::string exit_times_csv(const ExitSummary& summary);

/// Grid dump: JSON header line {box, shape, beta} followed by CSV rows
/// (index, coordinates, value).
std::string grid_values_dump(const Grid& g, double beta, const Eigen::VectorXd& values);

std::string sha256_hex(const std::string& bytes);

/// Collects written files and finishes with manifest.json (path, sha256,
/// bytes per entry, sorted by path).
class ArtifactWriter {
  public:
    explicit ArtifactWriter(std::filesystem::path dir);
    void write_text(const std::string& name, const std::string& content);
    void write_json(const std::string& name, const json& j);
    void finalize(const std::string& subcommand);
    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path dir_;
    struct Entry {
        std::string path;
        std::string sha256;
        std::size_t bytes;
    };
    std::vector<Entry> entries_;
};

}  // namespace mw::io
