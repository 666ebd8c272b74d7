#ifndef VMCF_PIPELINE_HPP
#define VMCF_PIPELINE_HPP

#include "vmcf/composite.hpp"
#include "vmcf/config.hpp"
#include "vmcf/evolution.hpp"
#include "vmcf/linearized.hpp"

#include <json.hpp>

#include <memory>
#include <string>

namespace vmcf {

/// Everything the staged construction produces, kept alive together because
/// later stages hold pointers into earlier ones.
struct PipelineArtifacts {
    RunConfig cfg;
    std::unique_ptr<GroundState> gs;
    std::unique_ptr<LinearizedOperator> lin;
    std::unique_ptr<SpectralForm> spectral;
    std::unique_ptr<InnerProfile> inner;
    std::unique_ptr<SelfSimilarProfile> ss;
    std::unique_ptr<RemoteProfile> remote;
    CompositeApprox composite;

    nlohmann::json report;
};

/// Runs ground-state -> linearized -> inner -> self-similar -> remote ->
/// compose (and optionally the evolution checks), collecting a machine
/// readable report. Stage failures surface as Error("stage <name>: ...").
PipelineArtifacts run_pipeline(const RunConfig& cfg, bool with_evolution = true);

/// Writes per-stage CSV artifacts plus report.json under cfg.out_dir.
void write_pipeline_outputs(const PipelineArtifacts& art);

} // namespace vmcf

#endif
