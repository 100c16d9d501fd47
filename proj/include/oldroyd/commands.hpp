#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "oldroyd/config.hpp"

namespace oldroyd {

enum ExitCode : int {
  exit_ok = 0,
  exit_error = 1,          // bad input, I/O or quadrature failure
  exit_check_failed = 2,   // `check` found a violated invariant
  exit_blow_up = 3,        // non-finite state during `run`
};

/// Evolves the configured initial data, writing one CSV row per sample time
/// and checkpoints every outputs.checkpoint_interval samples (and at the
/// end) when outputs.checkpoint is set. With resume_from, evolution restarts
/// from that checkpoint and the CSV holds the samples at or after its time.
int cmd_run(const RunConfig& config, std::ostream& log,
            const std::optional<std::string>& resume_from = std::nullopt);

/// Whole-space linear energy and shell integrals for p in {1, 4/3, 2} over
/// the positive sample times, written to outputs.csv, with fitted exponents
/// printed to `log`.
int cmd_oracle(const RunConfig& config, std::ostream& log);

/// Fits column against log(1 + time) over [t_lo, t_hi] and prints the result.
int cmd_fit(const std::string& csv_path, const std::string& column, double t_lo, double t_hi,
            std::ostream& log);

/// Invariant suite on a checkpoint: symmetry (on read), finiteness,
/// divergence residuals, dealiasing and the energy cancellations.
int cmd_check(const std::string& checkpoint_path, std::ostream& log);

}  // namespace oldroyd
