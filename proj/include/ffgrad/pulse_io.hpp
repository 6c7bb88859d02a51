#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ffgrad/optimizer.hpp"

// JSON documents for pulses, spectra and optimization problems. The schema is
// described in docs/file-formats.md.
namespace ffgrad::io {

/// Malformed document; what() starts with the offending field path.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

PulseSequence parse_pulse(std::string_view text);
std::string dump_pulse(const PulseSequence& pulse);

PulseSequence load_pulse(const std::filesystem::path& path);
void save_pulse(const PulseSequence& pulse, const std::filesystem::path& path);

/// `n_noises` is used to broadcast scalar S0 values and to check explicit tables.
SpectralDensity parse_spectrum(std::string_view text, std::size_t n_noises);
SpectralDensity load_spectrum(const std::filesystem::path& path, std::size_t n_noises);

OptimizationProblem parse_problem(std::string_view text);
OptimizationProblem load_problem(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);

}  // namespace ffgrad::io
