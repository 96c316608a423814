#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "mlmc/fft.hpp"
#include "mlmc/grid.hpp"

// Resolution-flexible spectral operator: pointwise lifting (with coordinate
// channels appended), L layers of [pointwise affine + truncated-mode spectral
// convolution, activation on all but the last], pointwise projection.
//
// Spectral weights are stored for the non-redundant half spectrum with the
// conjugate ties of the real FFT layout built in, so outputs are exactly real
// and the per-layer parameter count equals width^2 * (2*modes+1)^dim.
// Gradients are exact reverse-mode; the FFT adjoint is the conjugate
// transform with matching 1/n normalization.

namespace mlmc::model {

enum class Activation { gelu, identity };
enum class LossKind { squared, relative };

struct ModelConfig {
    int width = 16;
    int modes = 8;
    int layers = 3;
    Activation activation = Activation::gelu;
    LossKind loss = LossKind::squared;
    int input_channels = 1;
    int output_channels = 1;
    int dim = 2;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Packed kept-mode count, DC included: 2D keeps (k1,k2) with |k1|<=k,
// 0<=k2<=k (plus implied mirrors), 1D keeps |k|<=k.
int packed_mode_count(const ModelConfig& cfg);

// Slice offsets into the flat parameter vector.
struct ParamLayout {
    explicit ParamLayout(const ModelConfig& cfg);

    int width, modes, layers, in_total, out_channels, dim;
    int packed_modes;  // M, DC included

    std::size_t lift_w = 0, lift_b = 0;
    std::size_t layer_stride = 0, first_layer = 0;
    std::size_t spec_dc_rel = 0, spec_cplx_rel = 0, pw_w_rel = 0, pw_b_rel = 0;
    std::size_t proj_w = 0, proj_b = 0;
    std::size_t total = 0;

    std::size_t spec_dc(int l) const { return first_layer + l * layer_stride + spec_dc_rel; }
    std::size_t spec_cplx(int l) const { return first_layer + l * layer_stride + spec_cplx_rel; }
    std::size_t pw_w(int l) const { return first_layer + l * layer_stride + pw_w_rel; }
    std::size_t pw_b(int l) const { return first_layer + l * layer_stride + pw_b_rel; }
};

struct ModelParams {
    ModelConfig config;
    std::vector<double> data;
};

struct GradVector {
    std::vector<double> data;
};

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed);

// Per-evaluation scratch (activations, spectra, scatter tables). Reusable
// across calls; grows to fit the largest (config, resolution) seen.
struct Workspace {
    void ensure(const ModelConfig& cfg, int r);

    ModelConfig cfg;
    int r = 0;
    std::size_t n = 0, np = 0;   // nodes and 64B-padded plane stride
    std::size_t spec_n = 0;      // half-spectrum size
    int packed = 0;              // kept modes incl. DC

    fft::AlignedVec<double> in_planes;            // (in_ch+dim) * np
    fft::AlignedVec<double> act;                  // (L+1) * width * np
    fft::AlignedVec<double> pre;                  // L * width * np
    fft::AlignedVec<double> ds;                   // width * np
    fft::AlignedVec<double> dv;                   // width * np
    fft::AlignedVec<double> dv_prev;              // width * np
    fft::AlignedVec<double> pred;                 // np
    fft::AlignedVec<double> resid;                // np
    fft::AlignedVec<double> plane_tmp;            // np
    fft::AlignedVec<std::complex<double>> spec_full;  // spec_n
    fft::AlignedVec<std::complex<double>> zpacked;    // L * width * M
    fft::AlignedVec<std::complex<double>> gpacked;    // width * M
    fft::AlignedVec<std::complex<double>> tpacked;    // width * M

    std::vector<std::size_t> scatter;                       // M packed -> spectrum offset
    std::vector<std::pair<std::size_t, std::size_t>> mirrors;  // col-0 (canonical, mirror)
    fft::Transform xform;

    double* plane(fft::AlignedVec<double>& buf, int idx) { return buf.data() + idx * np; }
    std::complex<double>* zslice(int layer, int c) {
        return zpacked.data() + (static_cast<std::size_t>(layer) * cfg.width + c) * packed;
    }
};

// Fixed-size group of workspaces + gradient slots used for deterministic
// chunked batch evaluation (reduction order never depends on thread count).
class WorkspaceGroup {
  public:
    static constexpr int kChunks = 16;
    Workspace& workspace(int chunk) { return ws_[chunk]; }
    std::vector<double>& grad_slot(int chunk, std::size_t p);

  private:
    Workspace ws_[kChunks];
    std::vector<double> grads_[kChunks];
};

GridField forward(const ModelParams& params, const GridField& a, Workspace& ws);

double loss(const ModelParams& params, const GridField& a, const GridField& u, Workspace& ws);

// Returns the sample loss and accumulates d(loss)/d(theta) into grad_accum.
double loss_and_accum_grad(const ModelParams& params, const GridField& a, const GridField& u,
                           Workspace& ws, double* grad_accum);

using SamplePair = std::pair<const GridField*, const GridField*>;

struct BatchEval {
    double mean_loss = 0.0;
    GradVector grad;
};

// Mean loss and exact gradient of the mean loss over the batch.
BatchEval batch_loss_grad(const ModelParams& params, const std::vector<SamplePair>& batch,
                          WorkspaceGroup& group);
double batch_mean_loss(const ModelParams& params, const std::vector<SamplePair>& batch,
                       WorkspaceGroup& group);

inline GradVector grad(const ModelParams& params, const std::vector<SamplePair>& batch,
                       WorkspaceGroup& group) {
    return batch_loss_grad(params, batch, group).grad;
}

}  // namespace mlmc::model
