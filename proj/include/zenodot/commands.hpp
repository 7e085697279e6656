// commands.hpp — figure-reproduction subcommands
//
// Each command consumes a validated ConfigDocument and produces ResultFiles
// with the resolved configuration embedded. cmd_g2 emits one file per rate
// plus a combined long-format file.

#pragma once

#include <vector>

#include "zenodot/config.hpp"
#include "zenodot/results.hpp"

namespace zenodot::io {

// delta sweep: columns delta_ueV, p_co, p_cr, phase_rad
ResultFile cmd_povm(const ConfigDocument& cfg);

// correlation curves per configured rate; last entry is the combined file
// (columns rate_per_ns, tau_ns, g2, stderr), preceded by one file per rate
// (columns tau_ns, g2, stderr)
std::vector<ResultFile> cmd_g2(const ConfigDocument& cfg, int threads = 1);

// columns t_ns, bloch_y, bloch_z, p_value
ResultFile cmd_sawtooth(const ConfigDocument& cfg);

// single row: tau_z_ns, double_commutator_trace_ueV2, m0, p_v, g2_0
ResultFile cmd_zeno(const ConfigDocument& cfg);

// single row: w_f_ueV, phase_slope_per_ueV, t_delta_min_ns, t_fluc_ns, ok
ResultFile cmd_validity(const ConfigDocument& cfg);

// auto-selected sawtooth pair: maximises |<i|H_N|j>| in the Overhauser basis,
// ordered so the state with the larger POVM weight comes first
std::pair<int, int> default_sawtooth_pair(const zeno::ZenoContext& ctx);

}  // namespace zenodot::io
