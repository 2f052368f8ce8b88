#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xnbf/baselines.hpp"
#include "xnbf/bw_filter.hpp"
#include "xnbf/estimation.hpp"
#include "xnbf/image.hpp"
#include "xnbf/image_io.hpp"
#include "xnbf/phantom.hpp"

namespace xnbf::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_invalid_config = 2,
    exit_io_failure = 3,
    exit_bracket_failure = 4,
};

/// Entry point shared by the executable and the tests. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// ---- argument parsing helpers ------------------------------------------------------------------

/// "x0,y0,w,h"
Roi parse_roi(std::string_view text);

/// "start:step:stop", inclusive of stop (within 1e-9 of a step). Empty or malformed
/// ranges throw InvalidArgument.
std::vector<double> parse_range(std::string_view text);

/// Comma separated tokens, whitespace trimmed, empty tokens rejected.
std::vector<std::string> split_list(std::string_view text);

/// Shortest decimal text that round-trips through strtod.
std::string format_number(double v);

// ---- pipeline ----------------------------------------------------------------------------------

struct RunConfig {
    std::optional<std::filesystem::path> input;
    bool usePhantom = false;
    PhantomSpec phantom{};

    std::optional<Roi> roi;
    int lattice = 11;
    std::optional<double> eta; ///< manual threshold; automatic selection when empty
    ThresholdPolicy policy{};
    NoiseEstimatorConfig estimator{};

    bool prefilter = false;
    PrefilterConfig prefilterCfg{};

    bool maskBorder = false;

    std::optional<std::filesystem::path> output;
    std::optional<std::filesystem::path> bwiOutput;
    std::optional<std::filesystem::path> kspaceDir;
    std::optional<std::filesystem::path> reportPath;
    std::optional<ImageFormat> format;
    SaveOptions save{Scaling::minmax, 8};

    /// Throws InvalidArgument when a field breaks its module's invariants.
    void validate() const;
};

struct PipelineResult {
    Image input;
    Image working; ///< input after the optional prefilter
    Image output;
    WeightImage bwi{1, 1};
    Roi roi;
    std::optional<NoiseEstimate> noise;
    std::optional<ContrastEstimate> contrast;
    std::optional<PrefilterResult> prefilter;
    double eta = 0.0;
    bool etaAuto = false;
    int directionCount = 0;
    std::optional<double> contrastIn;  ///< phantom input only: inner minus annulus core
    std::optional<double> contrastOut;
    double estimateMs = 0.0;
    double prefilterMs = 0.0;
    double filterMs = 0.0;
};

/// Loads or synthesises the input described by `cfg`.
Image load_input(const RunConfig& cfg);

/// estimate -> optional NLM prefilter -> binary weighted filter -> metrics. Throws
/// BracketError when automatic selection meets an empty bracket.
PipelineResult execute_pipeline(const RunConfig& cfg, const Image& input);

/// key=value run report naming every effective parameter.
std::string format_report(const RunConfig& cfg, const PipelineResult& res, std::string_view command);

/// Full run: load, execute, write output, BWI, k-space views and report. Nothing is written
/// unless execution succeeds.
void run_pipeline(const RunConfig& cfg, std::string_view command, std::ostream& out, std::ostream& log);

// ---- sweeps ------------------------------------------------------------------------------------

enum class SweepKind { lattice, eta, kappa, noise };

struct SweepConfig {
    SweepKind kind = SweepKind::lattice;
    std::vector<std::string> values; ///< tokens, used verbatim in output names
    std::string prefix = "sweep";
    RunConfig base{};
    DiffusionConfig diffusion{}; ///< kappa sweep; kappa itself comes from the values
};

/// Writes `<prefix>_<param>=<value>.<ext>` per point plus `<prefix>.csv`.
void run_sweep(const SweepConfig& cfg, std::ostream& out, std::ostream& log);

std::string_view to_string(SweepKind kind);

} // namespace xnbf::cli
