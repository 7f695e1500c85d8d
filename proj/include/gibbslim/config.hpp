#pragma once

// Flat dotted key-value study configuration: parsing, per-mode validation,
// and assembly of the model objects a study needs.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gibbslim/model.hpp"
#include "gibbslim/types.hpp"

namespace gibbslim::config {

struct StudyConfig {
  std::string mode;  // onebody | bosonic | boltzon | measure-check | free-check

  RealVector eigenvalues;  // explicit model; empty when a grid is given
  std::optional<model::GridSpec> grid;
  Real grid_tol = 0;
  int modes = 0;
  Real nu = 0;

  bool has_rank1 = false;
  std::vector<Vector> rank1_vectors;
  RealVector rank1_weights;
  std::string kernel_type;  // "", "gaussian", "constant"
  Real kernel_amplitude = 0;
  Real kernel_width = 0;

  RealVector temperatures;
  std::vector<int> particles;

  Real lambda = 0;
  bool lambda_set = false;
  bool non_paper_regime = false;

  std::uint64_t samples = 0;

  Real eps = 1e-8;
  Index max_dim = 2'000'000;

  Real scf_tol = 1e-10;
  int scf_max_iter = 500;
  Real scf_damping = 0.5;
  int k_max = 2;

  std::uint64_t seed = 1;
  std::string basename;  // defaults to the mode name

  std::map<std::string, std::string> raw;  // echoed into JSON reports

  bool has_interaction() const { return has_rank1 || !kernel_type.empty(); }

  // solves the grid problem or wraps the explicit eigenvalues
  model::SpectralModel build_model() const;

  // zero operator when no interaction is configured
  model::TwoBodyOperator build_interaction(const model::SpectralModel& m) const;
};

StudyConfig parse_config(const std::string& text);
StudyConfig load_config(const std::string& path);

}  // namespace gibbslim::config
