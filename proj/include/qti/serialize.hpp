#pragma once

// Text artifacts: waveform and sweep CSVs, JSON reports. Numbers are written
// in shortest round-trip form so reruns are byte-identical.

#include "qti/design.hpp"
#include "qti/envelope.hpp"
#include "qti/runner.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace qti {

std::string format_number(double x);

// Columns t_ps, re, im, intensity.
std::string waveform_csv(const SampledEnvelope& env);

// Parses a waveform CSV back onto `grid`; throws Io on malformed input.
SampledEnvelope read_waveform_csv(const std::string& text, const TimeGrid& grid, double carrier_nm = kUnlabeledCarrier);

std::string design_json(const DesignReport& report);

struct NamedFile {
  std::string role;  // stage name or "interference_constructive" ...
  std::string file;
};

std::string simulation_json(const SimulationResult& result, const std::vector<NamedFile>& manifest);

std::string sweep_csv(const std::string& key, const std::vector<SweepRow>& rows);

// Writes files into a directory and removes everything it wrote (and the
// directory, if it created it) unless commit() was called.
class ArtifactWriter {
public:
  explicit ArtifactWriter(std::filesystem::path dir);
  ~ArtifactWriter();
  ArtifactWriter(const ArtifactWriter&) = delete;
  ArtifactWriter& operator=(const ArtifactWriter&) = delete;

  void write(const std::string& name, const std::string& content);
  void commit() noexcept { committed_ = true; }
  const std::filesystem::path& dir() const noexcept { return dir_; }
  const std::vector<std::string>& written() const noexcept { return written_; }

private:
  std::filesystem::path dir_;
  std::vector<std::string> written_;
  std::vector<std::filesystem::path> created_dirs_;
  bool committed_ = false;
};

// simulate: stage_NN_<name>.csv per stage, interference CSVs, report.json.
void write_simulation(ArtifactWriter& out, const SimulationResult& result);

}  // namespace qti
