#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cflow/flow.hpp"
#include "cflow/linearized.hpp"
#include "cflow/modulation.hpp"
#include "cflow/state.hpp"

namespace cflow::io {

/// CSV with header n,re,im; 17 significant digits so values round-trip exactly.
void write_modes_csv(const std::filesystem::path& path, const ModeVector& alpha);
ModeVector read_modes_csv(const std::filesystem::path& path);

/// JSON array of [re, im] pairs.
std::string modes_to_json(const ModeVector& alpha);
ModeVector modes_from_json(std::string_view text);

/// Columns t,H,Q,E followed by re_k,im_k for each recorded mode k.
void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& traj,
                          const std::vector<Index>& recorded_modes = {});

/// Columns t,c,p,theta,mu,dist_h12,dist_h1,residual.
void write_modulation_csv(const std::filesystem::path& path, const ModulationTrack& track);

/// Columns k,eigenvalue,residual.
void write_spectrum_csv(const std::filesystem::path& path, const SpectralReport& report);

/// Writes text to a file, creating parent directories. Throws std::runtime_error on failure.
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace cflow::io
