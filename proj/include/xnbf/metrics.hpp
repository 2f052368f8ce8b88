#pragma once

#include <iosfwd>
#include <vector>

#include "xnbf/baselines.hpp"
#include "xnbf/image.hpp"
#include "xnbf/noise.hpp"
#include "xnbf/phantom.hpp"

namespace xnbf {

struct CnrResult {
    double s_a = 0.0;
    double s_b = 0.0;
    double sigma = 0.0;
    double cnr = 0.0;
};

/// (mean_a - mean_b) / sigma
CnrResult cnr(const Image& img, const Mask& region_a, const Mask& region_b, double sigma);

struct CnrSweepConfig {
    PhantomSpec phantom{};
    int lattice = 11;
    /// Diffusion comparator: kappa = kappaFactor * sigma.
    double kappaFactor = 3.0;
    double lambda = 0.2;
    int iterations = 50;
    Diffusivity gfun = Diffusivity::exponential;
    /// Use the estimated sigma_M instead of the injected sigma as CNR denominator.
    bool estimatedSigma = false;
    /// Draw a fresh noise field per row from derive_seed(seed, row) instead of scaling one
    /// unit-variance field by each sigma.
    bool independentRows = false;
};

struct CnrRow {
    double sigma = 0.0;
    double cnr_input = 0.0;
    double cnr_filtered = 0.0;
    double cnr_diffusion = 0.0;
    double eta = 0.0;
};

/// One row per sigma: noisy phantom, auto-threshold binary weighted filter and the diffusion
/// comparator. CNR is inner disc against annulus_core(spec, lattice), so the annulus/background
/// edge does not enter the comparison. Sigmas must be strictly increasing.
std::vector<CnrRow> cnr_sweep(const CnrSweepConfig& cfg, const std::vector<double>& sigmas, RngSeed seed);

/// Header `sigma,cnr_input,cnr_filtered,cnr_diffusion`, LF line endings.
void write_cnr_csv(std::ostream& out, const std::vector<CnrRow>& rows);

} // namespace xnbf
