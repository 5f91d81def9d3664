#include "uniwalsh/io.hpp"

#include "uniwalsh/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace uniwalsh {

using json = nlohmann::ordered_json;

Limits RunConfig::limits() const {
    Limits l;
    l.mode = mode;
    l.fmax = fmax;
    l.max_rank_1d = grid_rank;
    l.seed = seed;
    return l;
}

void RunConfig::validate() const {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("epsilon must lie in (0,1)");
    if (fmax < 2) throw std::invalid_argument("fmax must be at least 2");
    if (grid_rank < 1) throw std::invalid_argument("grid rank must be positive");
    if (steps < 1) throw std::invalid_argument("steps must be positive");
    if (catalog.repeats < 1 || catalog.max_rank < 0 || catalog.value_range < 0)
        throw std::invalid_argument("bad catalog parameters");
}

std::string hex_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double parse_hex_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw ParseError("not a number: '" + s + "'");
    return v;
}

std::vector<std::uint64_t> rle_encode(std::span<const std::uint8_t> mask) {
    std::vector<std::uint64_t> runs;
    std::uint8_t cur = 0;
    std::uint64_t len = 0;
    for (auto m : mask) {
        const std::uint8_t b = m ? 1 : 0;
        if (b != cur) {
            runs.push_back(len);
            cur = b;
            len = 0;
        }
        ++len;
    }
    runs.push_back(len);
    return runs;
}

std::vector<std::uint8_t> rle_decode(std::span<const std::uint64_t> runs, std::size_t size) {
    std::vector<std::uint8_t> mask;
    mask.reserve(size);
    std::uint8_t cur = 0;
    for (auto r : runs) {
        if (r > size - mask.size()) throw ParseError("mask runs exceed " + std::to_string(size) + " cells");
        mask.insert(mask.end(), r, cur);
        cur ^= 1;
    }
    if (mask.size() != size)
        throw ParseError("mask runs cover " + std::to_string(mask.size()) + " of " + std::to_string(size) + " cells");
    return mask;
}

namespace {

json set_to_json(const DyadicSet2D& s) {
    return {{"rank_x", s.rank_x()}, {"rank_y", s.rank_y()}, {"runs", rle_encode(s.mask())}};
}

DyadicSet2D set_from_json(const json& j) {
    const int rx = j.at("rank_x").get<int>();
    const int ry = j.at("rank_y").get<int>();
    if (rx < 0 || ry < 0 || rx + ry > 40) throw ParseError("mask ranks out of range");
    const auto runs = j.at("runs").get<std::vector<std::uint64_t>>();
    return DyadicSet2D(rx, ry, rle_decode(runs, std::size_t{1} << (rx + ry)));
}

json step_to_json(const StepFunction2D& f) {
    json arr = json::array();
    for (const auto& p : f.pieces())
        arr.push_back({p.rect.x.rank, p.rect.x.index, p.rect.y.rank, p.rect.y.index, p.value.str()});
    return arr;
}

StepFunction2D step_from_json(const json& j) {
    std::vector<StepPiece2D> pieces;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 5) throw ParseError("step piece must be [rx, ix, ry, iy, value]");
        pieces.push_back({{{p[0].get<int>(), p[1].get<std::int64_t>()}, {p[2].get<int>(), p[3].get<std::int64_t>()}},
                          DyadicRational::parse(p[4].get<std::string>())});
    }
    try {
        return StepFunction2D(std::move(pieces));
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

json report_to_json(const Report& r) {
    json arr = json::array();
    for (const auto& c : r.checks())
        arr.push_back({{"name", c.name},
                       {"value", hex_double(c.value)},
                       {"bound", hex_double(c.bound)},
                       {"margin", hex_double(c.margin)},
                       {"passed", c.passed},
                       {"note", c.note}});
    return arr;
}

Report report_from_json(const json& j) {
    Report r;
    for (const auto& c : j)
        r.add(Check{c.at("name").get<std::string>(), parse_hex_double(c.at("value").get<std::string>()),
                    parse_hex_double(c.at("bound").get<std::string>()),
                    parse_hex_double(c.at("margin").get<std::string>()), c.at("passed").get<bool>(),
                    c.at("note").get<std::string>()});
    return r;
}

json config_to_json(const RunConfig& c) {
    return {{"depth", c.depth},
            {"epsilon", hex_double(c.eps)},
            {"mode", to_string(c.mode)},
            {"fmax", c.fmax},
            {"grid_rank", c.grid_rank},
            {"seed", c.seed},
            {"catalog_rank", c.catalog.max_rank},
            {"catalog_values", c.catalog.value_range},
            {"catalog_repeats", c.catalog.repeats},
            {"catalog_max_entries", c.catalog.max_entries},
            {"steps", c.steps}};
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.depth = j.at("depth").get<std::size_t>();
    c.eps = parse_hex_double(j.at("epsilon").get<std::string>());
    try {
        c.mode = parse_mode(j.at("mode").get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    c.fmax = j.at("fmax").get<Freq>();
    c.grid_rank = j.at("grid_rank").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.catalog.max_rank = j.at("catalog_rank").get<int>();
    c.catalog.value_range = j.at("catalog_values").get<int>();
    c.catalog.repeats = j.at("catalog_repeats").get<int>();
    c.catalog.max_entries = j.at("catalog_max_entries").get<std::size_t>();
    c.steps = j.at("steps").get<int>();
    return c;
}

json block_to_json(const BlockRecord& b) {
    json coeffs = json::array();
    for (const auto& c : b.P) coeffs.push_back({c.k, c.v, hex_double(c.value)});
    return {{"s", b.s},
            {"start", b.start},
            {"end", b.end},
            {"h", hex_double(b.h)},
            {"f", step_to_json(b.f)},
            {"coefficients", coeffs},
            {"E", set_to_json(b.E)},
            {"report", report_to_json(b.report)}};
}

BlockRecord block_from_json(const json& j) {
    BlockRecord b;
    b.s = j.at("s").get<std::size_t>();
    b.start = j.at("start").get<Freq>();
    b.end = j.at("end").get<Freq>();
    b.h = parse_hex_double(j.at("h").get<std::string>());
    b.f = step_from_json(j.at("f"));
    for (const auto& c : j.at("coefficients")) {
        if (!c.is_array() || c.size() != 3) throw ParseError("coefficient must be [k, v, value]");
        b.P.push_back({c[0].get<Freq>(), c[1].get<Freq>(), parse_hex_double(c[2].get<std::string>())});
    }
    for (std::size_t i = 1; i < b.P.size(); ++i)
        if (std::pair(b.P[i - 1].k, b.P[i - 1].v) >= std::pair(b.P[i].k, b.P[i].v))
            throw ParseError("coefficients not sorted by (k, v) at entry " + std::to_string(i));
    b.E = set_from_json(j.at("E"));
    b.report = report_from_json(j.at("report"));
    return b;
}

json weight_to_json(const WeightFunction& w) {
    json mu = json::array(), omega = json::array();
    for (double m : w.mu) mu.push_back(hex_double(m));
    for (const auto& o : w.omega) omega.push_back(set_to_json(o));
    return {{"epsilon", hex_double(w.eps)}, {"n0", w.n0}, {"depth", w.depth}, {"mu", mu}, {"omega", omega}};
}

WeightFunction weight_from_json(const json& j) {
    WeightFunction w;
    w.eps = parse_hex_double(j.at("epsilon").get<std::string>());
    w.n0 = j.at("n0").get<int>();
    w.depth = j.at("depth").get<std::size_t>();
    for (const auto& m : j.at("mu")) w.mu.push_back(parse_hex_double(m.get<std::string>()));
    for (const auto& o : j.at("omega")) w.omega.push_back(set_from_json(o));
    if (w.omega.empty() || w.mu.size() != w.depth || w.n0 < 1 ||
        w.omega.size() != w.depth - static_cast<std::size_t>(w.n0) + 1)
        throw ParseError("weight levels inconsistent with n0 and depth");
    w.E = w.omega.front();
    w.values = weight_values(w.omega, w.n0, w.mu);
    return w;
}

// Runs `fn`, prefixing any error with the JSON location.
template <class F>
auto at_location(const std::string& where, F&& fn) {
    try {
        return fn();
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what());
    } catch (const json::exception& e) {
        throw ParseError(where + ": " + e.what());
    }
}

}  // namespace

std::string serialize(const SeriesFile& file) {
    json blocks = json::array();
    for (const auto& b : file.blocks) blocks.push_back(block_to_json(b));
    json boundaries = json::array();
    for (Freq n : file.series.boundaries()) boundaries.push_back(n);
    json j = {{"format", "uniwalsh-series"},
              {"version", file.version},
              {"config", config_to_json(file.config)},
              {"mode", to_string(file.config.mode)},
              {"seed", file.config.seed},
              {"boundaries", boundaries},
              {"blocks", blocks},
              {"weight", file.weight ? weight_to_json(*file.weight) : json(nullptr)},
              {"failure", file.failure ? json(*file.failure) : json(nullptr)},
              {"failure_kind", file.failure_kind}};
    return j.dump(1) + "\n";
}

SeriesFile deserialize(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("series file: byte " + std::to_string(e.byte) + ": " + e.what());
    }
    SeriesFile f;
    at_location("header", [&] {
        if (j.at("format").get<std::string>() != "uniwalsh-series") throw ParseError("not a series file");
        f.version = j.at("version").get<int>();
        if (f.version != kSeriesFormatVersion)
            throw ParseError("unsupported version " + std::to_string(f.version));
        return 0;
    });
    f.config = at_location("config", [&] { return config_from_json(j.at("config")); });
    const auto& blocks = at_location("blocks", [&]() -> const json& { return j.at("blocks"); });
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const std::string where = "blocks[" + std::to_string(i) + "]";
        f.blocks.push_back(at_location(where, [&] { return block_from_json(blocks[i]); }));
        at_location(where, [&] {
            try {
                f.series.append_block(f.blocks.back().P, f.blocks.back().end);
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what());
            }
            return 0;
        });
    }
    at_location("boundaries", [&] {
        const auto b = j.at("boundaries").get<std::vector<Freq>>();
        const auto have = f.series.boundaries();
        if (!std::equal(b.begin(), b.end(), have.begin(), have.end()))
            throw ParseError("boundaries disagree with the block list");
        return 0;
    });
    at_location("weight", [&] {
        if (!j.at("weight").is_null()) f.weight = weight_from_json(j.at("weight"));
        return 0;
    });
    at_location("failure", [&] {
        if (!j.at("failure").is_null()) f.failure = j.at("failure").get<std::string>();
        f.failure_kind = j.at("failure_kind").get<std::string>();
        return 0;
    });
    return f;
}

void save_series(const std::string& path, const SeriesFile& file) {
    const std::string text = serialize(file);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot write " + tmp);
        os << text;
        if (!os.flush()) throw Error("write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error("cannot rename " + tmp + " to " + path + ": " + ec.message());
}

SeriesFile load_series(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    try {
        return deserialize(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_value(const std::string& tok) {
    if (tok.find('/') != std::string::npos) return DyadicRational::parse(tok).to_double();
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || *end != '\0' || !std::isfinite(v)) throw ParseError("bad value '" + tok + "'");
    return v;
}

}  // namespace

Grid2D parse_target(std::string_view text) {
    std::vector<std::string> lines;
    {
        std::istringstream is{std::string(text)};
        std::string line;
        while (std::getline(is, line)) lines.push_back(line);
    }
    auto fail = [](std::size_t line, const std::string& msg) -> ParseError {
        return ParseError("target line " + std::to_string(line + 1) + ": " + msg);
    };

    std::size_t first = 0;
    while (first < lines.size() && trim(lines[first]).empty()) ++first;
    int p = -1, q = -1;
    if (first < lines.size() && std::sscanf(trim(lines[first]).c_str(), "# grid %d %d", &p, &q) == 2) {
        if (p < 0 || q < 0 || p + q > 24) throw fail(first, "grid ranks out of range");
        Grid2D g(p, q);
        std::size_t row = 0;
        for (std::size_t ln = first + 1; ln < lines.size(); ++ln) {
            const std::string t = trim(lines[ln]);
            if (t.empty() || t[0] == '#') continue;
            if (row >= g.rows()) throw fail(ln, "more than " + std::to_string(g.rows()) + " rows");
            const auto cells = split(t, ',');
            if (cells.size() != g.cols()) throw fail(ln, "expected " + std::to_string(g.cols()) + " values");
            for (std::size_t c = 0; c < cells.size(); ++c) {
                try {
                    g.at(row, c) = parse_value(trim(cells[c]));
                } catch (const ParseError& e) {
                    throw fail(ln, e.what());
                }
            }
            ++row;
        }
        if (row != g.rows()) throw ParseError("target: expected " + std::to_string(g.rows()) + " rows, got " +
                                              std::to_string(row));
        return g;
    }

    std::vector<StepPiece2D> pieces;
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
        const std::string t = trim(lines[ln]);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream is(t);
        int rx, ry;
        std::int64_t ix, iy;
        std::string value, extra;
        if (!(is >> rx >> ix >> ry >> iy >> value) || (is >> extra))
            throw fail(ln, "expected 'rank_x index_x rank_y index_y value'");
        if (rx < 0 || ry < 0 || rx > 20 || ry > 20 || ix < 0 || iy < 0 || ix >= (std::int64_t{1} << rx) ||
            iy >= (std::int64_t{1} << ry))
            throw fail(ln, "interval out of range");
        try {
            pieces.push_back({{{rx, ix}, {ry, iy}}, DyadicRational::parse(value)});
        } catch (const ParseError& e) {
            throw fail(ln, e.what());
        }
    }
    try {
        const StepFunction2D f(std::move(pieces));
        const auto [fx, fy] = f.resolution_ranks();
        return rasterize(f, fx, fy);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("target: ") + e.what());
    }
}

Grid2D load_target(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    try {
        return parse_target(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void write_trace_csv(std::ostream& os, const ApproxTrace& trace) {
    os << "# greedy trace; bound_mu = 2*2^-2q, bound_ps = 21*2^-2q; status in {verified, unverified, "
          "unapproximable}\n";
    os << "q,n_q,err_mu,bound_mu,err_rect_max,err_sph_max,bound_ps,status\n";
    char buf[512];
    for (const auto& s : trace.steps) {
        std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", s.q, s.n, s.err_mu, s.bound_mu,
                      s.err_rect, s.err_sph, s.bound_ps, s.status.c_str());
        os << buf;
    }
}

}  // namespace uniwalsh
