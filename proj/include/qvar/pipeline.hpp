#pragma once

#include <stdexcept>

#include "qvar/config.hpp"

namespace qvar {

// Raised when a required input file is absent; the CLI maps it to exit code 2.
class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void cmd_index(const ExperimentConfig& config);
void cmd_generate(const ExperimentConfig& config);
void cmd_run(const ExperimentConfig& config);
void cmd_compare_queries(const ExperimentConfig& config);
void cmd_compare_pools(const ExperimentConfig& config);
void cmd_metrics(const ExperimentConfig& config);

}  // namespace qvar
