#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "mlmc/dataset.hpp"
#include "mlmc/errors.hpp"
#include "mlmc/grid.hpp"

#include "json.hpp"

namespace mlmc {

namespace {

constexpr char kMagic[8] = {'M', 'L', 'M', 'C', 'D', 'S', '0', '1'};
constexpr std::uint32_t kVersion = 1;

class CrcWriter {
  public:
    explicit CrcWriter(std::ofstream& out) : out_(out) {}
    void write(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
        crc_ = crc32(crc_, static_cast<const Bytef*>(data), static_cast<uInt>(n));
    }
    template <typename T>
    void write_scalar(T v) {
        write(&v, sizeof(T));
    }
    std::uint32_t crc() const { return static_cast<std::uint32_t>(crc_); }

  private:
    std::ofstream& out_;
    uLong crc_ = crc32(0L, Z_NULL, 0);
};

class CrcReader {
  public:
    explicit CrcReader(std::ifstream& in) : in_(in) {}
    void read(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw FormatError("dataset file truncated");
        crc_ = crc32(crc_, static_cast<const Bytef*>(data), static_cast<uInt>(n));
    }
    template <typename T>
    T read_scalar() {
        T v;
        read(&v, sizeof(T));
        return v;
    }
    std::uint32_t crc() const { return static_cast<std::uint32_t>(crc_); }

  private:
    std::ifstream& in_;
    uLong crc_ = crc32(0L, Z_NULL, 0);
};

void write_meta(const MultiResDataset& ds, const std::string& path) {
    nlohmann::json meta;
    meta["kind"] = ds.provenance.kind;
    meta["seed"] = ds.provenance.seed;
    meta["grf"] = {{"shift", ds.provenance.grf_shift}, {"exponent", ds.provenance.grf_exponent}};
    meta["solver"] = {{"tol", ds.provenance.solver_tol},
                      {"max_iter_factor", ds.provenance.solver_max_iter_factor}};
    std::ofstream out(path);
    out << meta.dump(2) << "\n";
}

void read_meta(MultiResDataset& ds, const std::string& path) {
    std::ifstream in(path);
    if (!in) return;  // metadata sidecar is optional on load
    nlohmann::json meta;
    try {
        in >> meta;
    } catch (const nlohmann::json::exception&) {
        return;
    }
    ds.provenance.kind = meta.value("kind", std::string{});
    ds.provenance.seed = meta.value("seed", std::uint64_t{0});
    if (meta.contains("grf")) {
        ds.provenance.grf_shift = meta["grf"].value("shift", 9.0);
        ds.provenance.grf_exponent = meta["grf"].value("exponent", 2.0);
    }
    if (meta.contains("solver")) {
        ds.provenance.solver_tol = meta["solver"].value("tol", 1e-10);
        ds.provenance.solver_max_iter_factor = meta["solver"].value("max_iter_factor", 50);
    }
}

}  // namespace

void save_dataset(const MultiResDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("save_dataset: cannot open " + path + " for writing");
    out.write(kMagic, sizeof(kMagic));

    CrcWriter w(out);
    w.write_scalar<std::uint32_t>(kVersion);
    w.write_scalar<std::uint32_t>(static_cast<std::uint32_t>(ds.hierarchy.size()));
    w.write_scalar<std::uint64_t>(static_cast<std::uint64_t>(ds.n_samples));
    for (const auto& lvl : ds.hierarchy)
        w.write_scalar<std::uint32_t>(static_cast<std::uint32_t>(lvl.points_per_side));
    w.write_scalar<std::uint32_t>(static_cast<std::uint32_t>(ds.dim));

    for (const auto& per_level : {std::cref(ds.inputs), std::cref(ds.outputs)}) {
        for (const auto& fields : per_level.get()) {
            for (const auto& f : fields)
                w.write(f.values.data(), f.values.size() * sizeof(double));
        }
    }
    const std::uint32_t crc = w.crc();
    out.write(reinterpret_cast<const char*>(&crc), sizeof(crc));
    if (!out) throw ConfigError("save_dataset: write failed for " + path);
    out.close();

    write_meta(ds, path + ".meta.json");
}

MultiResDataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("load_dataset: cannot open " + path);

    char magic[8];
    in.read(magic, sizeof(magic));
    if (static_cast<std::size_t>(in.gcount()) != sizeof(magic) ||
        std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError("load_dataset: bad magic bytes (not a dataset file)");

    CrcReader rd(in);
    const auto version = rd.read_scalar<std::uint32_t>();
    if (version != kVersion)
        throw FormatError("load_dataset: unsupported version " + std::to_string(version));
    const auto m = rd.read_scalar<std::uint32_t>();
    const auto n = rd.read_scalar<std::uint64_t>();
    if (m == 0 || m > 16) throw FormatError("load_dataset: implausible level count");

    std::vector<std::uint32_t> res(m);
    for (auto& r : res) r = rd.read_scalar<std::uint32_t>();
    const auto dim = rd.read_scalar<std::uint32_t>();
    if (dim != 1 && dim != 2) throw FormatError("load_dataset: dimension must be 1 or 2");

    MultiResDataset ds;
    ds.dim = static_cast<int>(dim);
    ds.n_samples = static_cast<std::size_t>(n);
    ds.hierarchy.resize(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        const int r = static_cast<int>(res[i]);
        if (r < 3) throw FormatError("load_dataset: implausible resolution");
        ds.hierarchy[i] = ResolutionLevel{static_cast<int>(i) + 1, r, 1.0 / (r - 1)};
    }

    ds.inputs.assign(m, {});
    ds.outputs.assign(m, {});
    for (auto* group : {&ds.inputs, &ds.outputs}) {
        for (std::uint32_t li = 0; li < m; ++li) {
            auto& fields = (*group)[li];
            fields.reserve(ds.n_samples);
            const std::size_t count =
                ds.dim == 1 ? static_cast<std::size_t>(res[li])
                            : static_cast<std::size_t>(res[li]) * res[li];
            for (std::uint64_t s = 0; s < n; ++s) {
                GridField f(ds.hierarchy[li], ds.dim);
                rd.read(f.values.data(), count * sizeof(double));
                fields.push_back(std::move(f));
            }
        }
    }

    const std::uint32_t expected = rd.crc();
    std::uint32_t stored;
    in.read(reinterpret_cast<char*>(&stored), sizeof(stored));
    if (static_cast<std::size_t>(in.gcount()) != sizeof(stored))
        throw FormatError("dataset file truncated");
    if (stored != expected) throw FormatError("load_dataset: checksum mismatch");

    read_meta(ds, path + ".meta.json");
    return ds;
}

}  // namespace mlmc
