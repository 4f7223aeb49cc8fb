#include "elsh/index.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <future>
#include <thread>

#include "elsh/dataset_io.hpp"

namespace elsh {

namespace {

constexpr char kIndexMagic[4] = {'E', 'L', 'S', 'H'};
constexpr std::uint64_t kIndexVersion = 1;

void csr_fill(BucketTable& tbl, std::vector<std::pair<std::uint64_t, std::uint32_t>>& pairs) {
    std::sort(pairs.begin(), pairs.end());
    tbl.ids.resize(pairs.size());
    tbl.keys.clear();
    tbl.offsets.clear();
    std::uint64_t prev = 0;
    bool have_prev = false;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!have_prev || pairs[i].first != prev) {
            tbl.keys.push_back(pairs[i].first);
            tbl.offsets.push_back(i);
            prev = pairs[i].first;
            have_prev = true;
        }
        tbl.ids[i] = pairs[i].second;
    }
    tbl.offsets.push_back(pairs.size());
}

BucketTable make_table_near(const PointSet& points, const SearchPlan& plan, Rng rng) {
    BucketTable tbl;
    tbl.hash = new_composite(points.dim(), plan.k, plan.width, HashMode::interval, rng);
    std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs;
    pairs.reserve(points.size());
    CompositeKey key;
    for (std::size_t i = 0; i < points.size(); ++i) {
        composite_key_into(tbl.hash, points.row(i), points.dim(), key);
        pairs.emplace_back(key_digest(key), static_cast<std::uint32_t>(i));
    }
    csr_fill(tbl, pairs);
    return tbl;
}

BucketTable make_table_expanded(const PointSet& points, const SearchPlan& plan, Rng rng) {
    BucketTable tbl;
    tbl.hash = new_composite(points.dim(), plan.k, plan.width, HashMode::interval, rng);
    const ProjectedSampler sampler(tbl.hash);

    std::vector<std::pair<std::uint64_t, std::uint32_t>> pairs;
    pairs.reserve(points.size() * plan.replication);
    std::vector<double> base(plan.k), proj(plan.k);
    std::vector<std::uint64_t> scratch;
    scratch.reserve(plan.replication);
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double* p = points.row(i);
        for (std::uint32_t j = 0; j < plan.k; ++j) {
            const ProjectionHash& h = tbl.hash.projections[j];
            base[j] = project(h, p, points.dim()) + h.shift;
        }
        scratch.clear();
        for (std::uint64_t rep = 0; rep < plan.replication; ++rep) {
            sampler.sample(base, plan.r, rng, proj);
            scratch.push_back(projected_digest(proj, plan.width));
        }
        // Repeats of the same key add no recall, only space.
        std::sort(scratch.begin(), scratch.end());
        scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
        for (std::uint64_t h : scratch) pairs.emplace_back(h, static_cast<std::uint32_t>(i));
    }
    csr_fill(tbl, pairs);
    return tbl;
}

/// Builds tables[t] = make(t) for all t, a few tables at a time.
template <class Make>
void build_tables(std::vector<BucketTable>& tables, std::uint32_t L, const Make& make) {
    tables.resize(L);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::uint32_t workers = std::min<std::uint32_t>({L, hw, 8});
    for (std::uint32_t begin = 0; begin < L; begin += workers) {
        const std::uint32_t end = std::min(L, begin + workers);
        std::vector<std::future<void>> jobs;
        for (std::uint32_t t = begin; t < end; ++t)
            jobs.push_back(std::async(std::launch::async, [&, t] { tables[t] = make(t); }));
        for (auto& j : jobs) j.get();
    }
}

void common_validate(const PointSet& points, const SearchPlan& plan, std::uint32_t L) {
    if (points.empty()) throw std::invalid_argument("build: dataset is empty");
    if (points.size() >= UINT32_MAX) throw std::invalid_argument("build: too many points");
    if (plan.k < 1) throw std::invalid_argument("build: plan.k must be >= 1");
    if (!(plan.width > 0.0)) throw std::invalid_argument("build: plan.width must be > 0");
    if (L < 1) throw std::invalid_argument("build: need at least one table");
}

}  // namespace

std::span<const std::uint32_t> BucketTable::lookup(std::uint64_t digest) const {
    const auto it = std::lower_bound(keys.begin(), keys.end(), digest);
    if (it == keys.end() || *it != digest) return {};
    const std::size_t slot = static_cast<std::size_t>(it - keys.begin());
    return {ids.data() + offsets[slot], ids.data() + offsets[slot + 1]};
}

std::uint64_t BucketTable::max_bucket() const {
    std::uint64_t best = 0;
    for (std::size_t i = 0; i + 1 < offsets.size(); ++i)
        best = std::max(best, offsets[i + 1] - offsets[i]);
    return best;
}

std::uint64_t Index::entries() const {
    std::uint64_t total = 0;
    for (const BucketTable& t : tables) total += t.entries();
    return total;
}

void Index::finalize() {
    samplers.clear();
    samplers.reserve(tables.size());
    for (const BucketTable& t : tables) samplers.emplace_back(t.hash);
}

Index build_near_linear(const PointSet& points, const SearchPlan& plan, std::uint32_t L,
                        const Rng& rng) {
    common_validate(points, plan, L);
    Index idx;
    idx.variant = IndexVariant::near_linear;
    idx.plan = plan;
    idx.plan.tables = L;
    idx.plan.replication = 1;
    idx.plan.bucket_scan_cap = 0;
    idx.n = points.size();
    idx.d = points.dim();
    idx.points = points;
    idx.has_points = true;
    build_tables(idx.tables, L,
                 [&](std::uint32_t t) { return make_table_near(points, idx.plan, rng.fork(t)); });
    idx.finalize();
    return idx;
}

Index build_expanded(const PointSet& points, const SearchPlan& plan, std::uint32_t L,
                     const Rng& rng, std::uint64_t memory_cap_bytes) {
    common_validate(points, plan, L);
    if (plan.replication < 1) throw std::invalid_argument("build_expanded: replication must be >= 1");
    // Guard before any allocation: every (point, replica, table) may become a
    // ~16-byte entry (digest + id, plus CSR overhead).
    const double projected_bytes = 16.0 * static_cast<double>(points.size()) *
                                   static_cast<double>(plan.replication) *
                                   static_cast<double>(L);
    if (projected_bytes > static_cast<double>(memory_cap_bytes)) {
        throw std::runtime_error(
            "build_expanded: projected index of ~" + std::to_string(projected_bytes / 1e9) +
            " GB exceeds the memory cap of " +
            std::to_string(static_cast<double>(memory_cap_bytes) / 1e9) +
            " GB; lower the replication count or raise the cap");
    }
    Index idx;
    idx.variant = IndexVariant::expanded;
    idx.plan = plan;
    idx.plan.tables = L;
    idx.n = points.size();
    idx.d = points.dim();
    idx.points = points;
    idx.has_points = true;
    build_tables(idx.tables, L, [&](std::uint32_t t) {
        return make_table_expanded(points, idx.plan, rng.fork(t));
    });
    idx.finalize();
    return idx;
}

void fingerprint_into(const CompositeHash& sketch, const double* p, std::size_t d,
                      std::uint64_t* out) {
    const std::size_t bits = sketch.k();
    std::memset(out, 0, ((bits + 63) / 64) * sizeof(std::uint64_t));
    for (std::size_t b = 0; b < bits; ++b)
        if (sign_bit(sketch.projections[b], p, d)) out[b >> 6] |= 1ull << (b & 63);
}

std::vector<std::uint64_t> fingerprint(const CompositeHash& sketch, const double* p,
                                       std::size_t d) {
    std::vector<std::uint64_t> out((sketch.k() + 63) / 64);
    fingerprint_into(sketch, p, d, out.data());
    return out;
}

std::uint32_t hamming_distance(const std::uint64_t* a, const std::uint64_t* b,
                               std::uint32_t words) {
    std::uint32_t total = 0;
    for (std::uint32_t i = 0; i < words; ++i) total += std::popcount(a[i] ^ b[i]);
    return total;
}

void add_fingerprints(Index& index, std::uint32_t bits, const Rng& rng) {
    if (bits == 0) throw std::invalid_argument("add_fingerprints: bits must be >= 1");
    if (!index.has_points)
        throw std::invalid_argument("add_fingerprints: index no longer carries points");
    Rng sr = rng.fork(0xF16Eull);
    index.sketch = new_composite(index.d, bits, 1.0, HashMode::sign, sr);
    index.fingerprint_bits = bits;
    const std::uint32_t words = index.fingerprint_words();
    index.fingerprints.assign(index.n * words, 0);
    for (std::uint64_t i = 0; i < index.n; ++i)
        fingerprint_into(index.sketch, index.points.row(i), index.d,
                         index.fingerprints.data() + i * words);
}

std::span<const std::uint32_t> bucket_lookup(const Index& index, std::uint32_t table_id,
                                             const CompositeKey& key) {
    if (table_id >= index.tables.size())
        throw std::out_of_range("bucket_lookup: table " + std::to_string(table_id) +
                                " of " + std::to_string(index.tables.size()));
    return index.tables[table_id].lookup(key_digest(key));
}

// ---------------------------------------------------------------------------
// Serialization.

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

struct ChecksumWriter {
    std::ofstream out;
    std::uint64_t fnv = kFnvOffset;

    explicit ChecksumWriter(const std::string& path)
        : out(path, std::ios::binary | std::ios::trunc) {
        if (!out) throw FormatError("cannot open " + path + " for writing");
    }
    void raw(const void* p, std::size_t bytes) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < bytes; ++i) {
            fnv ^= b[i];
            fnv *= kFnvPrime;
        }
        out.write(static_cast<const char*>(p), static_cast<std::streamsize>(bytes));
    }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void finish() {
        const std::uint64_t digest = fnv;
        out.write(reinterpret_cast<const char*>(&digest), sizeof digest);
        if (!out) throw FormatError("index write failed");
    }
};

struct Cursor {
    const unsigned char* p;
    const unsigned char* end;
    void raw(void* dst, std::size_t bytes) {
        if (static_cast<std::size_t>(end - p) < bytes)
            throw FormatError("truncated index file");
        std::memcpy(dst, p, bytes);
        p += bytes;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        raw(&v, sizeof v);
        return v;
    }
    double f64() {
        double v;
        raw(&v, sizeof v);
        return v;
    }
};

void write_hash(ChecksumWriter& w, const CompositeHash& H) {
    w.u64(static_cast<std::uint64_t>(H.mode));
    w.u64(H.k());
    for (const ProjectionHash& h : H.projections) {
        w.u64(h.direction.size());
        w.f64(h.width);
        w.f64(h.shift);
        w.raw(h.direction.data(), h.direction.size() * sizeof(double));
    }
}

CompositeHash read_hash(Cursor& c) {
    CompositeHash H;
    const std::uint64_t mode = c.u64();
    if (mode > 1) throw FormatError("bad hash mode");
    H.mode = static_cast<HashMode>(mode);
    const std::uint64_t k = c.u64();
    if (k == 0 || k > (1ull << 24)) throw FormatError("implausible projection count");
    H.projections.resize(k);
    for (ProjectionHash& h : H.projections) {
        const std::uint64_t d = c.u64();
        if (d == 0 || d > (1ull << 30)) throw FormatError("implausible dimension");
        h.width = c.f64();
        h.shift = c.f64();
        h.direction.resize(d);
        c.raw(h.direction.data(), d * sizeof(double));
    }
    return H;
}

void write_plan(ChecksumWriter& w, const SearchPlan& plan) {
    w.u64(plan.k);
    w.f64(plan.g);
    w.f64(plan.M);
    w.f64(plan.rho);
    w.u64(plan.probe_budget);
    w.u64(plan.far_cap);
    w.u64(plan.distance_grid.size());
    w.raw(plan.distance_grid.data(), plan.distance_grid.size() * sizeof(double));
    w.f64(plan.c);
    w.f64(plan.r);
    w.f64(plan.D);
    w.f64(plan.width);
    w.u64(plan.tables);
    w.u64(plan.replication);
    w.u64(plan.bucket_scan_cap);
    w.f64(plan.epsilon);
    w.u64(plan.budget_clamped ? 1 : 0);
}

SearchPlan read_plan(Cursor& c) {
    SearchPlan plan;
    plan.k = static_cast<std::uint32_t>(c.u64());
    plan.g = c.f64();
    plan.M = c.f64();
    plan.rho = c.f64();
    plan.probe_budget = c.u64();
    plan.far_cap = c.u64();
    const std::uint64_t grid = c.u64();
    if (grid > (1ull << 24)) throw FormatError("implausible grid size");
    plan.distance_grid.resize(grid);
    c.raw(plan.distance_grid.data(), grid * sizeof(double));
    plan.c = c.f64();
    plan.r = c.f64();
    plan.D = c.f64();
    plan.width = c.f64();
    plan.tables = static_cast<std::uint32_t>(c.u64());
    plan.replication = c.u64();
    plan.bucket_scan_cap = static_cast<std::uint32_t>(c.u64());
    plan.epsilon = c.f64();
    plan.budget_clamped = c.u64() != 0;
    return plan;
}

}  // namespace

void save_index(const Index& index, const std::string& path) {
    ChecksumWriter w(path);
    w.raw(kIndexMagic, 4);
    w.u64(kIndexVersion);
    w.u64(static_cast<std::uint64_t>(index.variant));
    w.u64(index.n);
    w.u64(index.d);
    w.u64(index.plan.k);
    w.u64(index.tables.size());
    w.f64(index.plan.D);
    std::uint64_t flags = 0;
    if (index.has_points) flags |= 1;
    if (index.fingerprint_bits > 0) flags |= 2;
    w.u64(flags);
    write_plan(w, index.plan);
    for (const BucketTable& t : index.tables) {
        write_hash(w, t.hash);
        w.u64(t.keys.size());
        w.raw(t.keys.data(), t.keys.size() * sizeof(std::uint64_t));
        w.raw(t.offsets.data(), t.offsets.size() * sizeof(std::uint64_t));
        w.u64(t.ids.size());
        w.raw(t.ids.data(), t.ids.size() * sizeof(std::uint32_t));
    }
    if (index.fingerprint_bits > 0) {
        w.u64(index.fingerprint_bits);
        write_hash(w, index.sketch);
        w.raw(index.fingerprints.data(), index.fingerprints.size() * sizeof(std::uint64_t));
    }
    if (index.has_points)
        w.raw(index.points.data().data(), index.points.data().size() * sizeof(double));
    w.finish();
}

Index load_index(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw FormatError("cannot open " + path);
    const std::streamsize size = in.tellg();
    if (size < 20) throw FormatError("truncated index file: " + path);
    std::vector<unsigned char> buf(static_cast<std::size_t>(size));
    in.seekg(0);
    in.read(reinterpret_cast<char*>(buf.data()), size);
    if (!in) throw FormatError("read failed: " + path);

    std::uint64_t fnv = kFnvOffset;
    for (std::size_t i = 0; i + 8 < buf.size(); ++i) {
        fnv ^= buf[i];
        fnv *= kFnvPrime;
    }
    std::uint64_t stored;
    std::memcpy(&stored, buf.data() + buf.size() - 8, 8);
    if (fnv != stored) throw FormatError("checksum mismatch in " + path);

    Cursor c{buf.data(), buf.data() + buf.size() - 8};
    char magic[4];
    c.raw(magic, 4);
    if (std::memcmp(magic, kIndexMagic, 4) != 0)
        throw FormatError("bad magic bytes in " + path);
    const std::uint64_t version = c.u64();
    if (version != kIndexVersion)
        throw FormatError("unsupported index version " + std::to_string(version));

    Index idx;
    const std::uint64_t variant = c.u64();
    if (variant > 1) throw FormatError("bad index variant");
    idx.variant = static_cast<IndexVariant>(variant);
    idx.n = c.u64();
    idx.d = c.u64();
    const std::uint64_t header_k = c.u64();
    const std::uint64_t L = c.u64();
    (void)c.f64();  // D, repeated inside the plan
    const std::uint64_t flags = c.u64();
    idx.plan = read_plan(c);
    if (idx.plan.k != header_k) throw FormatError("header/plan mismatch");
    if (L == 0 || L > (1ull << 20)) throw FormatError("implausible table count");

    idx.tables.resize(L);
    for (BucketTable& t : idx.tables) {
        t.hash = read_hash(c);
        const std::uint64_t nkeys = c.u64();
        if (nkeys > (1ull << 40)) throw FormatError("implausible key count");
        t.keys.resize(nkeys);
        c.raw(t.keys.data(), nkeys * sizeof(std::uint64_t));
        t.offsets.resize(nkeys + 1);
        c.raw(t.offsets.data(), (nkeys + 1) * sizeof(std::uint64_t));
        const std::uint64_t nids = c.u64();
        if (nids > (1ull << 40)) throw FormatError("implausible id count");
        t.ids.resize(nids);
        c.raw(t.ids.data(), nids * sizeof(std::uint32_t));
    }
    if (flags & 2) {
        idx.fingerprint_bits = static_cast<std::uint32_t>(c.u64());
        idx.sketch = read_hash(c);
        idx.fingerprints.resize(idx.n * idx.fingerprint_words());
        c.raw(idx.fingerprints.data(), idx.fingerprints.size() * sizeof(std::uint64_t));
    }
    if (flags & 1) {
        idx.points = PointSet(idx.n, idx.d);
        c.raw(idx.points.data().data(), idx.n * idx.d * sizeof(double));
        idx.has_points = true;
    }
    idx.finalize();
    return idx;
}

}  // namespace elsh
