#include "mlmc/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "mlmc/errors.hpp"
#include "mlmc/kernels.hpp"
#include "mlmc/parallel.hpp"
#include "mlmc/rng.hpp"

namespace mlmc::model {

namespace {

using cplx = std::complex<double>;

void validate_config(const ModelConfig& cfg) {
    if (cfg.width < 1 || cfg.modes < 1 || cfg.layers < 1)
        throw ConfigError("model: width, modes and layers must be >= 1");
    if (cfg.dim != 1 && cfg.dim != 2) throw ConfigError("model: dim must be 1 or 2");
    if (cfg.input_channels != 1 || cfg.output_channels != 1)
        throw ConfigError("model: only single channel in/out is supported");
}

inline std::size_t round_up(std::size_t n, std::size_t a) { return (n + a - 1) / a * a; }

}  // namespace

int packed_mode_count(const ModelConfig& cfg) {
    const int k = cfg.modes;
    return cfg.dim == 2 ? 1 + k + (2 * k + 1) * k : 1 + k;
}

ParamLayout::ParamLayout(const ModelConfig& cfg) {
    validate_config(cfg);
    width = cfg.width;
    modes = cfg.modes;
    layers = cfg.layers;
    in_total = cfg.input_channels + cfg.dim;
    out_channels = cfg.output_channels;
    dim = cfg.dim;
    packed_modes = packed_mode_count(cfg);

    const std::size_t w = static_cast<std::size_t>(width);
    std::size_t off = 0;
    lift_w = off;
    off += w * in_total;
    lift_b = off;
    off += w;

    first_layer = off;
    spec_dc_rel = 0;
    spec_cplx_rel = w * w;
    pw_w_rel = spec_cplx_rel + 2 * w * w * (packed_modes - 1);
    pw_b_rel = pw_w_rel + w * w;
    layer_stride = pw_b_rel + w;
    off += static_cast<std::size_t>(layers) * layer_stride;

    proj_w = off;
    off += static_cast<std::size_t>(out_channels) * w;
    proj_b = off;
    off += out_channels;
    total = off;
}

ModelParams init_params(const ModelConfig& cfg, std::uint64_t seed) {
    const ParamLayout lay(cfg);
    ModelParams p;
    p.config = cfg;
    p.data.assign(lay.total, 0.0);
    Rng rng(derive_seed(seed, 0x6d6f64656cULL));

    const double lift_scale = 1.0 / std::sqrt(static_cast<double>(lay.in_total));
    const double pw_scale = 1.0 / std::sqrt(static_cast<double>(cfg.width));
    const double spec_scale = 1.0 / (static_cast<double>(cfg.width) * cfg.width);

    for (std::size_t i = lay.lift_w; i < lay.first_layer; ++i)
        p.data[i] = rng.uniform(-lift_scale, lift_scale);
    for (int l = 0; l < cfg.layers; ++l) {
        const std::size_t dc = lay.spec_dc(l);
        for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.width) * cfg.width; ++i)
            p.data[dc + i] = rng.uniform(-spec_scale, spec_scale);
        const std::size_t cx = lay.spec_cplx(l);
        const std::size_t cx_n =
            2 * static_cast<std::size_t>(cfg.width) * cfg.width * (lay.packed_modes - 1);
        for (std::size_t i = 0; i < cx_n; ++i) p.data[cx + i] = rng.uniform(-spec_scale, spec_scale);
        const std::size_t pw = lay.pw_w(l);
        for (std::size_t i = 0; i < static_cast<std::size_t>(cfg.width) * cfg.width + cfg.width; ++i)
            p.data[pw + i] = rng.uniform(-pw_scale, pw_scale);
    }
    for (std::size_t i = lay.proj_w; i < lay.total; ++i)
        p.data[i] = rng.uniform(-pw_scale, pw_scale);
    return p;
}

void Workspace::ensure(const ModelConfig& c, int res) {
    if (r == res && cfg == c) return;
    validate_config(c);
    if (2 * c.modes + 1 > res)
        throw ConfigError("model: resolution " + std::to_string(res) +
                          " too small for modes=" + std::to_string(c.modes));
    cfg = c;
    r = res;
    n = c.dim == 2 ? static_cast<std::size_t>(r) * r : static_cast<std::size_t>(r);
    np = round_up(n, 8);
    const std::size_t cols = fft::half_cols(r);
    spec_n = c.dim == 2 ? static_cast<std::size_t>(r) * cols : cols;
    packed = packed_mode_count(c);

    const std::size_t w = static_cast<std::size_t>(c.width);
    const std::size_t L = static_cast<std::size_t>(c.layers);
    in_planes.resize((c.input_channels + c.dim) * np);
    act.resize((L + 1) * w * np);
    pre.resize(L * w * np);
    ds.resize(w * np);
    dv.resize(w * np);
    dv_prev.resize(w * np);
    pred.resize(np);
    resid.resize(np);
    plane_tmp.resize(np);
    spec_full.resize(spec_n);
    zpacked.resize(L * w * packed);
    gpacked.resize(w * packed);
    tpacked.resize(w * packed);
    xform = fft::Transform(c.dim, r);

    // Packed order: DC, then (2D) column-0 rows k1=1..k, then columns
    // k2=1..k with rows k1=-k..k. 1D: DC then k=1..k.
    const int k = c.modes;
    scatter.clear();
    mirrors.clear();
    scatter.reserve(packed);
    scatter.push_back(0);
    if (c.dim == 2) {
        for (int k1 = 1; k1 <= k; ++k1) {
            scatter.push_back(static_cast<std::size_t>(k1) * cols);
            mirrors.emplace_back(static_cast<std::size_t>(k1) * cols,
                                 static_cast<std::size_t>(r - k1) * cols);
        }
        for (int k2 = 1; k2 <= k; ++k2)
            for (int k1 = -k; k1 <= k; ++k1) {
                const int row = k1 >= 0 ? k1 : r + k1;
                scatter.push_back(static_cast<std::size_t>(row) * cols + k2);
            }
    } else {
        for (int k1 = 1; k1 <= k; ++k1) scatter.push_back(static_cast<std::size_t>(k1));
    }

    // Coordinate channels appended to the lifting input.
    const double h = 1.0 / (r - 1);
    for (int d = 0; d < c.dim; ++d) {
        double* plane = in_planes.data() + (c.input_channels + d) * np;
        if (c.dim == 1) {
            for (int i = 0; i < r; ++i) plane[i] = i * h;
        } else if (d == 0) {
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) plane[static_cast<std::size_t>(i) * r + j] = i * h;
        } else {
            for (int i = 0; i < r; ++i)
                for (int j = 0; j < r; ++j) plane[static_cast<std::size_t>(i) * r + j] = j * h;
        }
    }
}

std::vector<double>& WorkspaceGroup::grad_slot(int chunk, std::size_t p) {
    grads_[chunk].assign(p, 0.0);
    return grads_[chunk];
}

namespace {

struct Ctx {
    const ModelParams& params;
    const ParamLayout lay;
    Workspace& ws;

    Ctx(const ModelParams& p, Workspace& w) : params(p), lay(p.config), ws(w) {}

    const double* pd() const { return params.data.data(); }
    int width() const { return params.config.width; }
    int layers() const { return params.config.layers; }
    std::size_t np() const { return ws.np; }
    std::size_t n() const { return ws.n; }

    const cplx* spec_w(int l, int cout, int cin) const {
        return reinterpret_cast<const cplx*>(pd() + lay.spec_cplx(l)) +
               (static_cast<std::size_t>(cout) * width() + cin) * (lay.packed_modes - 1);
    }
    double spec_dc_w(int l, int cout, int cin) const {
        return pd()[lay.spec_dc(l) + static_cast<std::size_t>(cout) * width() + cin];
    }
};

// Gather kept modes from the half spectrum; canonical positions only.
inline void gather_packed(const Workspace& ws, const cplx* spec, cplx* packed) {
    const std::size_t m = ws.scatter.size();
    for (std::size_t i = 0; i < m; ++i) packed[i] = spec[ws.scatter[i]];
}

// Scatter packed modes into a zeroed half spectrum and restore the column-0
// conjugate mirrors so the implied full spectrum is Hermitian.
inline void scatter_packed(Workspace& ws, const cplx* packed) {
    cplx* spec = ws.spec_full.data();
    std::fill(spec, spec + ws.spec_n, cplx(0.0, 0.0));
    const std::size_t m = ws.scatter.size();
    for (std::size_t i = 0; i < m; ++i) spec[ws.scatter[i]] = packed[i];
    spec[0] = cplx(packed[0].real(), 0.0);  // DC must be real
    for (const auto& [canon, mirror] : ws.mirrors) spec[mirror] = std::conj(spec[canon]);
}

void run_forward(Ctx& ctx, const GridField& a) {
    Workspace& ws = ctx.ws;
    const int w = ctx.width();
    const int L = ctx.layers();
    const std::size_t n = ctx.n();
    const std::size_t np = ctx.np();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double* pd = ctx.pd();

    // input plane 0 = field values (coordinate planes are set in ensure()).
    std::memcpy(ws.in_planes.data(), a.values.data(), n * sizeof(double));

    // Lifting.
    const int in_total = ctx.lay.in_total;
    for (int c = 0; c < w; ++c) {
        double* v0 = ws.plane(ws.act, c);
        const double bias = pd[ctx.lay.lift_b + c];
        std::fill(v0, v0 + n, bias);
        for (int j = 0; j < in_total; ++j)
            kernels::axpy(pd[ctx.lay.lift_w + static_cast<std::size_t>(c) * in_total + j],
                          ws.in_planes.data() + j * np, v0, n);
    }

    for (int l = 0; l < L; ++l) {
        double* vin = ws.plane(ws.act, l * w);
        double* s = ws.plane(ws.pre, l * w);
        double* vout = ws.plane(ws.act, (l + 1) * w);

        // Pointwise affine into the pre-activation planes.
        for (int cout = 0; cout < w; ++cout) {
            double* sp = s + cout * np;
            const double bias = pd[ctx.lay.pw_b(l) + cout];
            std::fill(sp, sp + n, bias);
            for (int cin = 0; cin < w; ++cin)
                kernels::axpy(pd[ctx.lay.pw_w(l) + static_cast<std::size_t>(cout) * w + cin],
                              vin + cin * np, sp, n);
        }

        // Spectral path: FFT each input channel, multiply kept modes, inverse.
        for (int cin = 0; cin < w; ++cin) {
            ws.xform.forward(vin + cin * np, ws.spec_full.data());
            gather_packed(ws, ws.spec_full.data(), ws.zslice(l, cin));
        }
        const int mm = ws.packed;
        for (int cout = 0; cout < w; ++cout) {
            cplx* y = ws.tpacked.data() + static_cast<std::size_t>(cout) * mm;
            std::fill(y, y + mm, cplx(0.0, 0.0));
            for (int cin = 0; cin < w; ++cin) {
                const cplx* z = ws.zslice(l, cin);
                y[0] += ctx.spec_dc_w(l, cout, cin) * z[0];
                kernels::cmul_acc(ctx.spec_w(l, cout, cin), z + 1, y + 1, mm - 1);
            }
        }
        for (int cout = 0; cout < w; ++cout) {
            scatter_packed(ws, ws.tpacked.data() + static_cast<std::size_t>(cout) * mm);
            ws.xform.backward(ws.spec_full.data(), ws.plane_tmp.data());
            kernels::axpy(inv_n, ws.plane_tmp.data(), s + cout * np, n);
        }

        // Activation (last layer stays linear).
        const bool act = ctx.params.config.activation == Activation::gelu && l + 1 < L;
        for (int c = 0; c < w; ++c) {
            if (act)
                kernels::gelu(s + c * np, vout + c * np, n);
            else
                std::memcpy(vout + c * np, s + c * np, n * sizeof(double));
        }
    }

    // Projection (single output channel).
    double* out = ws.pred.data();
    std::fill(out, out + n, pd[ctx.lay.proj_b]);
    const double* vlast = ws.plane(ws.act, L * w);
    for (int c = 0; c < w; ++c)
        kernels::axpy(pd[ctx.lay.proj_w + c], vlast + c * np, out, n);
}

double seed_loss_backward(Ctx& ctx, const GridField& u) {
    // resid = pred - u; returns the loss and leaves d(loss)/d(pred) in resid.
    Workspace& ws = ctx.ws;
    const std::size_t n = ctx.n();
    kernels::sub(ws.pred.data(), u.values.data(), ws.resid.data(), n);
    const double hd = ctx.params.config.dim == 2 ? u.level.spacing * u.level.spacing
                                                 : u.level.spacing;
    const double rss = kernels::sumsq(ws.resid.data(), n);
    double loss_val = hd * rss;
    double scale = 2.0 * hd;
    if (ctx.params.config.loss == LossKind::relative) {
        const double denom = hd * kernels::sumsq(u.values.data(), n);
        loss_val /= denom;
        scale /= denom;
    }
    kernels::scal(scale, ws.resid.data(), n);
    return loss_val;
}

void run_backward(Ctx& ctx, double* g) {
    Workspace& ws = ctx.ws;
    const int w = ctx.width();
    const int L = ctx.layers();
    const std::size_t n = ctx.n();
    const std::size_t np = ctx.np();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double* pd = ctx.pd();
    const ParamLayout& lay = ctx.lay;

    // Projection backward; d(loss)/d(pred) sits in ws.resid.
    const double* dpred = ws.resid.data();
    const double* vlast = ws.plane(ws.act, L * w);
    g[lay.proj_b] += kernels::sum(dpred, n);
    for (int c = 0; c < w; ++c) {
        g[lay.proj_w + c] += kernels::dot(dpred, vlast + c * np, n);
        double* dvc = ws.plane(ws.dv, c);
        std::fill(dvc, dvc + n, 0.0);
        kernels::axpy(pd[lay.proj_w + c], dpred, dvc, n);
    }

    const int mm = ws.packed;
    for (int l = L - 1; l >= 0; --l) {
        const double* vin = ws.plane(ws.act, l * w);
        const double* s = ws.plane(ws.pre, l * w);
        const bool act = ctx.params.config.activation == Activation::gelu && l + 1 < L;

        // ds = dv * sigma'(s) (or dv when the layer is linear).
        for (int c = 0; c < w; ++c) {
            if (act)
                kernels::gelu_vjp(s + c * np, ws.plane(ws.dv, c), ws.plane(ws.ds, c), n);
            else
                std::memcpy(ws.plane(ws.ds, c), ws.plane(ws.dv, c), n * sizeof(double));
        }

        // Pointwise affine backward.
        for (int cout = 0; cout < w; ++cout) {
            const double* dsc = ws.plane(ws.ds, cout);
            g[lay.pw_b(l) + cout] += kernels::sum(dsc, n);
            for (int cin = 0; cin < w; ++cin)
                g[lay.pw_w(l) + static_cast<std::size_t>(cout) * w + cin] +=
                    kernels::dot(dsc, vin + cin * np, n);
        }
        for (int cin = 0; cin < w; ++cin) {
            double* dp = ws.plane(ws.dv_prev, cin);
            std::fill(dp, dp + n, 0.0);
            for (int cout = 0; cout < w; ++cout)
                kernels::axpy(pd[lay.pw_w(l) + static_cast<std::size_t>(cout) * w + cin],
                              ws.plane(ws.ds, cout), dp, n);
        }

        // Spectral backward: G = FFT(ds); dW_k += (2/n) G_k conj(Z_k) for the
        // free complex modes ((1/n) Re(...) at DC); input grad via W^H G.
        for (int cout = 0; cout < w; ++cout) {
            ws.xform.forward(ws.plane(ws.ds, cout), ws.spec_full.data());
            gather_packed(ws, ws.spec_full.data(),
                          ws.gpacked.data() + static_cast<std::size_t>(cout) * mm);
        }
        for (int cout = 0; cout < w; ++cout) {
            const cplx* gp = ws.gpacked.data() + static_cast<std::size_t>(cout) * mm;
            for (int cin = 0; cin < w; ++cin) {
                const cplx* zp = ws.zslice(l, cin);
                g[lay.spec_dc(l) + static_cast<std::size_t>(cout) * w + cin] +=
                    inv_n * (gp[0].real() * zp[0].real() + gp[0].imag() * zp[0].imag());
                cplx* dw = reinterpret_cast<cplx*>(g + lay.spec_cplx(l)) +
                           (static_cast<std::size_t>(cout) * w + cin) * (mm - 1);
                kernels::couter_acc(2.0 * inv_n, gp + 1, zp + 1, dw, mm - 1);
            }
        }
        for (int cin = 0; cin < w; ++cin) {
            cplx* tp = ws.tpacked.data() + static_cast<std::size_t>(cin) * mm;
            std::fill(tp, tp + mm, cplx(0.0, 0.0));
        }
        for (int cout = 0; cout < w; ++cout) {
            const cplx* gp = ws.gpacked.data() + static_cast<std::size_t>(cout) * mm;
            for (int cin = 0; cin < w; ++cin) {
                cplx* tp = ws.tpacked.data() + static_cast<std::size_t>(cin) * mm;
                tp[0] += ctx.spec_dc_w(l, cout, cin) * gp[0];
                kernels::cmulc_acc(ctx.spec_w(l, cout, cin), gp + 1, tp + 1, mm - 1);
            }
        }
        for (int cin = 0; cin < w; ++cin) {
            scatter_packed(ws, ws.tpacked.data() + static_cast<std::size_t>(cin) * mm);
            ws.xform.backward(ws.spec_full.data(), ws.plane_tmp.data());
            kernels::axpy(inv_n, ws.plane_tmp.data(), ws.plane(ws.dv_prev, cin), n);
        }

        std::swap(ws.dv, ws.dv_prev);
    }

    // Lifting backward.
    const int in_total = lay.in_total;
    for (int c = 0; c < w; ++c) {
        const double* dvc = ws.plane(ws.dv, c);
        g[lay.lift_b + c] += kernels::sum(dvc, n);
        for (int j = 0; j < in_total; ++j)
            g[lay.lift_w + static_cast<std::size_t>(c) * in_total + j] +=
                kernels::dot(dvc, ws.in_planes.data() + j * np, n);
    }
}

void check_pair(const GridField& a, const GridField& u, const ModelConfig& cfg) {
    if (a.dim != cfg.dim) throw ConfigError("model: field dimensionality mismatch");
    if (a.level.points_per_side != u.level.points_per_side || a.dim != u.dim)
        throw ConfigError("model: input/target resolution mismatch");
}

}  // namespace

GridField forward(const ModelParams& params, const GridField& a, Workspace& ws) {
    if (a.dim != params.config.dim) throw ConfigError("model: field dimensionality mismatch");
    ws.ensure(params.config, a.level.points_per_side);
    Ctx ctx(params, ws);
    run_forward(ctx, a);
    GridField out(a.level, a.dim);
    std::memcpy(out.values.data(), ws.pred.data(), ws.n * sizeof(double));
    return out;
}

double loss(const ModelParams& params, const GridField& a, const GridField& u, Workspace& ws) {
    check_pair(a, u, params.config);
    ws.ensure(params.config, a.level.points_per_side);
    Ctx ctx(params, ws);
    run_forward(ctx, a);
    kernels::sub(ws.pred.data(), u.values.data(), ws.resid.data(), ws.n);
    const double hd = params.config.dim == 2 ? u.level.spacing * u.level.spacing : u.level.spacing;
    double val = hd * kernels::sumsq(ws.resid.data(), ws.n);
    if (params.config.loss == LossKind::relative)
        val /= hd * kernels::sumsq(u.values.data(), ws.n);
    return val;
}

double loss_and_accum_grad(const ModelParams& params, const GridField& a, const GridField& u,
                           Workspace& ws, double* grad_accum) {
    check_pair(a, u, params.config);
    ws.ensure(params.config, a.level.points_per_side);
    Ctx ctx(params, ws);
    run_forward(ctx, a);
    const double val = seed_loss_backward(ctx, u);
    run_backward(ctx, grad_accum);
    return val;
}

namespace {

template <typename PerSample>
double chunked_batch(const std::vector<SamplePair>& batch, PerSample&& per_chunk) {
    // Chunk boundaries depend only on the batch size, so reductions are
    // bitwise reproducible regardless of the worker count.
    const std::size_t b = batch.size();
    const int chunks = static_cast<int>(std::min<std::size_t>(WorkspaceGroup::kChunks, b));
    std::vector<double> losses(chunks, 0.0);
    parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
        const std::size_t lo = b * c / chunks;
        const std::size_t hi = b * (c + 1) / chunks;
        losses[c] = per_chunk(static_cast<int>(c), lo, hi);
    });
    double total = 0.0;
    for (double v : losses) total += v;
    return total;
}

}  // namespace

BatchEval batch_loss_grad(const ModelParams& params, const std::vector<SamplePair>& batch,
                          WorkspaceGroup& group) {
    if (batch.empty()) throw ConfigError("model: empty batch");
    const ParamLayout lay(params.config);
    const std::size_t b = batch.size();
    const int chunks = static_cast<int>(std::min<std::size_t>(WorkspaceGroup::kChunks, b));

    std::vector<std::vector<double>*> slots(chunks);
    const double total = chunked_batch(batch, [&](int c, std::size_t lo, std::size_t hi) {
        slots[c] = &group.grad_slot(c, lay.total);
        Workspace& ws = group.workspace(c);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            acc += loss_and_accum_grad(params, *batch[i].first, *batch[i].second, ws,
                                       slots[c]->data());
        return acc;
    });

    BatchEval out;
    out.grad.data.assign(lay.total, 0.0);
    for (int c = 0; c < chunks; ++c)
        kernels::axpy(1.0, slots[c]->data(), out.grad.data.data(), lay.total);
    const double inv_b = 1.0 / static_cast<double>(b);
    kernels::scal(inv_b, out.grad.data.data(), lay.total);
    out.mean_loss = total * inv_b;
    return out;
}

double batch_mean_loss(const ModelParams& params, const std::vector<SamplePair>& batch,
                       WorkspaceGroup& group) {
    if (batch.empty()) throw ConfigError("model: empty batch");
    const double total = chunked_batch(batch, [&](int c, std::size_t lo, std::size_t hi) {
        Workspace& ws = group.workspace(c);
        double acc = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            acc += loss(params, *batch[i].first, *batch[i].second, ws);
        return acc;
    });
    return total / static_cast<double>(batch.size());
}

}  // namespace mlmc::model
