#include "kdesketch/io.hpp"

#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

namespace kdesketch {

namespace {

constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    }
    void magic(const char tag[4]) { out_.write(tag, 4); }
    void u8(std::uint8_t v) { raw(&v, 1); }
    void u32(std::uint32_t v) { le(v); }
    void u64(std::uint64_t v) { le(v); }
    void i64(std::int64_t v) { le(static_cast<std::uint64_t>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        le(bits);
    }
    void f64s(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }
    void label(const std::string& s) {
        if (s.size() > 255) throw std::runtime_error("label too long");
        u8(static_cast<std::uint8_t>(s.size()));
        raw(s.data(), s.size());
    }
    void close() {
        out_.close();
        if (!out_) throw std::runtime_error("write failed");
    }

private:
    template <typename T>
    void le(T v) {
        unsigned char buf[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
        raw(buf, sizeof(T));
    }
    void raw(const void* p, std::size_t n) { out_.write(static_cast<const char*>(p), n); }
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open for reading: " + path);
    }
    void magic(const char tag[4]) {
        char buf[4];
        raw(buf, 4);
        if (std::memcmp(buf, tag, 4) != 0) throw std::runtime_error("bad magic; not a kdesketch file");
    }
    std::uint8_t u8() {
        std::uint8_t v;
        raw(&v, 1);
        return v;
    }
    std::uint32_t u32() { return le<std::uint32_t>(); }
    std::uint64_t u64() { return le<std::uint64_t>(); }
    std::int64_t i64() { return static_cast<std::int64_t>(le<std::uint64_t>()); }
    double f64() {
        const std::uint64_t bits = le<std::uint64_t>();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::vector<double> f64s() {
        const std::uint64_t n = u64();
        std::vector<double> v(n);
        for (auto& x : v) x = f64();
        return v;
    }
    std::string label() {
        const std::uint8_t n = u8();
        std::string s(n, '\0');
        raw(s.data(), n);
        return s;
    }

private:
    template <typename T>
    T le() {
        unsigned char buf[sizeof(T)];
        raw(buf, sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
        return v;
    }
    void raw(void* p, std::size_t n) {
        in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n)) {
            throw std::runtime_error("truncated kdesketch file");
        }
    }
    std::ifstream in_;
};

struct CommonHeader {
    std::uint64_t n_points = 0, d = 0;
    double sigma = 1.0, delta_bound = 0.0, epsilon = 0.0, delta = 0.0;
    std::map<std::string, std::uint64_t> seeds;
    std::map<std::string, double> scalars;
};

void write_common(Writer& w, const CommonHeader& h) {
    w.u64(h.n_points);
    w.u64(h.d);
    w.f64(h.sigma);
    w.f64(h.delta_bound);
    w.f64(h.epsilon);
    w.f64(h.delta);
    w.u32(static_cast<std::uint32_t>(h.seeds.size()));
    for (const auto& [k, v] : h.seeds) {
        w.label(k);
        w.u64(v);
    }
    w.u32(static_cast<std::uint32_t>(h.scalars.size()));
    for (const auto& [k, v] : h.scalars) {
        w.label(k);
        w.f64(v);
    }
}

CommonHeader read_common(Reader& r) {
    CommonHeader h;
    h.n_points = r.u64();
    h.d = r.u64();
    h.sigma = r.f64();
    h.delta_bound = r.f64();
    h.epsilon = r.f64();
    h.delta = r.f64();
    const std::uint32_t ns = r.u32();
    for (std::uint32_t i = 0; i < ns; ++i) {
        const std::string k = r.label();
        h.seeds[k] = r.u64();
    }
    const std::uint32_t np = r.u32();
    for (std::uint32_t i = 0; i < np; ++i) {
        const std::string k = r.label();
        h.scalars[k] = r.f64();
    }
    return h;
}

CommonHeader header_for(const KdeSketch& s) {
    CommonHeader h;
    h.n_points = s.n_points;
    h.d = s.d;
    h.sigma = s.sigma;
    h.delta_bound = s.delta_bound;
    h.epsilon = s.epsilon;
    h.delta = s.delta;
    h.seeds["master"] = s.seed;
    h.scalars["c_log"] = s.consts.c_log;
    h.scalars["c_m"] = s.consts.c_m;
    h.scalars["log_exponent"] = static_cast<double>(s.consts.log_exponent);
    h.scalars["full_fastfood"] = s.consts.full_fastfood ? 1.0 : 0.0;
    h.scalars["outer_subsample"] = s.consts.outer_subsample ? 1.0 : 0.0;
    switch (s.method) {
        case Method::OURS:
            h.scalars["m"] = static_cast<double>(s.embedding.m);
            h.scalars["ell_out"] = static_cast<double>(s.embedding.ell_out);
            h.scalars["s"] = s.embedding.s;
            break;
        case Method::RFF:
            h.scalars["rff_features"] = static_cast<double>(s.rff_features);
            break;
        case Method::FJLT_RFF:
            h.scalars["rff_features"] = static_cast<double>(s.rff_features);
            h.scalars["d_eps"] = static_cast<double>(s.d_eps);
            break;
        case Method::FASTFOOD:
            h.scalars["fastfood_ell"] = static_cast<double>(s.fastfood_ell);
            break;
    }
    return h;
}

double scalar_or(const CommonHeader& h, const std::string& key, double fallback) {
    auto it = h.scalars.find(key);
    return it == h.scalars.end() ? fallback : it->second;
}

KdeSketch sketch_from(const CommonHeader& h, Method method) {
    KdeSketch s;
    s.method = method;
    s.n_points = h.n_points;
    s.d = h.d;
    s.sigma = h.sigma;
    s.delta_bound = h.delta_bound;
    s.epsilon = h.epsilon;
    s.delta = h.delta;
    s.eta = h.delta / static_cast<double>(h.n_points);
    auto seed_it = h.seeds.find("master");
    if (seed_it == h.seeds.end()) throw std::runtime_error("sketch file: missing master seed");
    s.seed = seed_it->second;
    s.consts.c_log = scalar_or(h, "c_log", 4.0);
    s.consts.c_m = scalar_or(h, "c_m", 1.0);
    s.consts.log_exponent = static_cast<int>(scalar_or(h, "log_exponent", 1.0));
    s.consts.full_fastfood = scalar_or(h, "full_fastfood", 0.0) != 0.0;
    s.consts.outer_subsample = scalar_or(h, "outer_subsample", 0.0) != 0.0;
    switch (method) {
        case Method::OURS: {
            s.embedding = EmbeddingParams::for_kde(s.d, s.epsilon, s.eta,
                                                   s.delta_bound / s.sigma, s.seed, s.consts);
            const auto m_stored = static_cast<std::size_t>(scalar_or(h, "m", 0.0));
            if (m_stored != 0 && m_stored != s.embedding.m) {
                throw std::runtime_error("sketch file: stored m disagrees with derivation");
            }
            break;
        }
        case Method::RFF:
            s.rff_features = static_cast<std::size_t>(scalar_or(h, "rff_features", 0.0));
            break;
        case Method::FJLT_RFF:
            s.rff_features = static_cast<std::size_t>(scalar_or(h, "rff_features", 0.0));
            s.d_eps = static_cast<std::size_t>(scalar_or(h, "d_eps", 0.0));
            break;
        case Method::FASTFOOD:
            s.fastfood_ell = static_cast<std::size_t>(scalar_or(h, "fastfood_ell", 0.0));
            break;
    }
    return s;
}

void write_gaussian_record(Writer& w, const KdeSketch& s) {
    write_common(w, header_for(s));
    w.f64s(s.mean_features);
}

KdeSketch read_gaussian_record(Reader& r, Method method) {
    KdeSketch s = sketch_from(read_common(r), method);
    s.mean_features = r.f64s();
    s.map = make_feature_map(s);
    return s;
}

}  // namespace

void write_dataset(const std::string& path, const Dataset& data) {
    Writer w(path);
    w.magic("KDS1");
    w.u32(kVersion);
    w.u64(data.n);
    w.u64(data.d);
    w.f64(data.sigma);
    w.f64(data.delta_bound);
    for (double x : data.points) w.f64(x);
    w.close();
}

Dataset read_dataset(const std::string& path) {
    Reader r(path);
    r.magic("KDS1");
    if (r.u32() != kVersion) throw std::runtime_error("dataset file: unsupported version");
    Dataset d;
    d.n = r.u64();
    d.d = r.u64();
    d.sigma = r.f64();
    d.delta_bound = r.f64();
    d.points.resize(d.n * d.d);
    for (auto& x : d.points) x = r.f64();
    return d;
}

void write_sketch(const std::string& path, const KdeSketch& sketch) {
    Writer w(path);
    w.magic("KSK1");
    w.u32(kVersion);
    w.u8(static_cast<std::uint8_t>(sketch.method));
    w.u8(0);  // gaussian kernel
    w.u8(0);  // flags
    w.u8(0);
    write_gaussian_record(w, sketch);
    w.close();
}

void write_sketch(const std::string& path, const ImqSketch& sketch) {
    Writer w(path);
    w.magic("KSK1");
    w.u32(kVersion);
    w.u8(static_cast<std::uint8_t>(sketch.bank_method));
    w.u8(1);  // imq kernel
    w.u8(0);
    w.u8(0);

    CommonHeader h;
    h.n_points = sketch.n_points;
    h.d = sketch.d;
    h.sigma = sketch.sigma;
    h.delta_bound = sketch.delta_bound;
    h.epsilon = sketch.epsilon;
    h.delta = sketch.delta;
    h.seeds["master"] = sketch.seed;
    h.scalars["beta"] = sketch.beta;
    h.scalars["delta_prime"] = sketch.delta_prime;
    write_common(w, h);

    w.f64(sketch.approx.beta);
    w.f64(sketch.approx.zeta);
    w.f64(sketch.approx.h);
    w.f64(sketch.approx.epsilon);
    w.i64(sketch.approx.M);
    w.i64(sketch.approx.N);
    w.f64s(sketch.approx.alphas);
    w.f64s(sketch.approx.lambdas);

    w.u32(static_cast<std::uint32_t>(sketch.bank.size()));
    for (const auto& bank : sketch.bank) write_gaussian_record(w, bank);
    w.close();
}

void write_sketch(const std::string& path, const DpSketch& sketch) {
    Writer w(path);
    w.magic("KSK1");
    w.u32(kVersion);
    w.u8(static_cast<std::uint8_t>(Method::OURS));
    w.u8(0);
    w.u8(1);  // dp flag
    w.u8(0);

    CommonHeader h;
    h.n_points = sketch.n_points;
    h.d = sketch.d;
    h.sigma = sketch.sigma;
    h.delta_bound = sketch.delta_bound;
    h.epsilon = sketch.epsilon;
    h.delta = sketch.delta;
    h.seeds["master"] = sketch.seed;
    h.scalars["c_log"] = sketch.feature_params.consts.c_log;
    h.scalars["c_m"] = sketch.feature_params.consts.c_m;
    h.scalars["log_exponent"] = static_cast<double>(sketch.feature_params.consts.log_exponent);
    h.scalars["full_fastfood"] = sketch.feature_params.consts.full_fastfood ? 1.0 : 0.0;
    h.scalars["outer_subsample"] = sketch.feature_params.consts.outer_subsample ? 1.0 : 0.0;
    write_common(w, h);

    // Privacy header: everything an auditor needs to check the noise scale.
    w.f64(sketch.params.eps_dp);
    w.u64(sketch.params.ell);
    w.f64(sketch.params.clip_level);
    w.f64(sketch.params.laplace_scale);
    w.f64(sketch.params.delta_prime);
    w.u64(sketch.params.feature_dim);
    w.u64(sketch.n_points);
    w.f64s(sketch.noisy_mean);
    w.close();
}

SketchFile read_sketch_file(const std::string& path) {
    Reader r(path);
    r.magic("KSK1");
    if (r.u32() != kVersion) throw std::runtime_error("sketch file: unsupported version");
    const auto method = static_cast<Method>(r.u8());
    const std::uint8_t kernel = r.u8();
    const std::uint8_t flags = r.u8();
    r.u8();

    SketchFile file;
    if (flags & 1) {
        file.kind = SketchFile::Kind::Dp;
        const CommonHeader h = read_common(r);
        DpSketch& s = file.dp;
        s.n_points = h.n_points;
        s.d = h.d;
        s.sigma = h.sigma;
        s.delta_bound = h.delta_bound;
        s.epsilon = h.epsilon;
        s.delta = h.delta;
        s.seed = h.seeds.at("master");
        EmbeddingConstants consts;
        consts.c_log = scalar_or(h, "c_log", 4.0);
        consts.c_m = scalar_or(h, "c_m", 1.0);
        consts.log_exponent = static_cast<int>(scalar_or(h, "log_exponent", 1.0));
        consts.full_fastfood = scalar_or(h, "full_fastfood", 0.0) != 0.0;
        consts.outer_subsample = scalar_or(h, "outer_subsample", 0.0) != 0.0;
        s.feature_params =
            EmbeddingParams::for_kde(s.d, s.epsilon, s.delta / static_cast<double>(s.n_points),
                                     s.delta_bound / s.sigma, s.seed, consts);
        s.params.eps_dp = r.f64();
        s.params.ell = r.u64();
        s.params.clip_level = r.f64();
        s.params.laplace_scale = r.f64();
        s.params.delta_prime = r.f64();
        s.params.feature_dim = r.u64();
        if (r.u64() != s.n_points) throw std::runtime_error("dp sketch: n mismatch");
        s.noisy_mean = r.f64s();
        if (s.noisy_mean.size() != s.params.ell) throw std::runtime_error("dp sketch: bad mean size");
        return file;
    }
    if (kernel == 1) {
        file.kind = SketchFile::Kind::Imq;
        const CommonHeader h = read_common(r);
        ImqSketch& s = file.imq;
        s.n_points = h.n_points;
        s.d = h.d;
        s.sigma = h.sigma;
        s.delta_bound = h.delta_bound;
        s.epsilon = h.epsilon;
        s.delta = h.delta;
        s.seed = h.seeds.at("master");
        s.beta = scalar_or(h, "beta", 1.0);
        s.delta_prime = scalar_or(h, "delta_prime", s.delta);
        s.bank_method = method;
        s.approx.beta = r.f64();
        s.approx.zeta = r.f64();
        s.approx.h = r.f64();
        s.approx.epsilon = r.f64();
        s.approx.M = r.i64();
        s.approx.N = r.i64();
        s.approx.alphas = r.f64s();
        s.approx.lambdas = r.f64s();
        const std::uint32_t banks = r.u32();
        s.bank.reserve(banks);
        for (std::uint32_t i = 0; i < banks; ++i) {
            s.bank.push_back(read_gaussian_record(r, method));
        }
        if (!s.bank.empty()) s.consts = s.bank.front().consts;
        return file;
    }
    file.kind = SketchFile::Kind::Gaussian;
    file.gaussian = read_gaussian_record(r, method);
    return file;
}

}  // namespace kdesketch
