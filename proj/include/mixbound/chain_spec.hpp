#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mixbound/kernel_core.hpp"

namespace mixbound {

// On-disk chain description (JSON object with exactly these fields):
//   name:    string
//   states:  integer
//   matrix:  list of rows
//   f:       list of numbers
//   initial: list of numbers, or the string "stationary"
struct ChainSpecFile {
    std::string name;
    std::uint64_t states = 0;
    Matrix matrix;
    std::vector<double> f;
    std::optional<std::vector<double>> initial;  // nullopt = "stationary"
};

struct SpecParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ChainSpecFile load_chain_spec(const std::filesystem::path& path);
ChainSpecFile parse_chain_spec(const std::string& text, const std::string& origin);
std::string chain_spec_to_json(const ChainSpecFile& spec);
void save_chain_spec(const ChainSpecFile& spec, const std::filesystem::path& path);

// Validates the spec contents and builds the analysis model.
ChainModel to_model(const ChainSpecFile& spec);

// Built-in generator families; f defaults to the first-state indicator and
// the initial law to "stationary".
ChainSpecFile generate_two_state(double p, double q);
ChainSpecFile generate_iid(std::vector<double> mu);
// eps . (repeated random row) + (1 - eps) . (random stochastic matrix);
// the shared row forces one-step contraction of at least eps.
ChainSpecFile generate_random_doeblin(std::uint64_t size, double epsilon, std::uint64_t seed);
ChainSpecFile generate_lazy(const ChainSpecFile& base, double lambda);

}  // namespace mixbound
