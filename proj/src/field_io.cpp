#include "hnlab/field_io.hpp"

#include "hnlab/torus_lattice.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace hnlab {

namespace {

constexpr char kMagic[4] = {'H', 'N', 'F', 'D'};
constexpr std::uint32_t kVersion = 1;

std::size_t per_site(FieldKind kind) {
    switch (kind) {
    case FieldKind::scalar: return 1;
    case FieldKind::section: return 2;
    case FieldKind::herm2: return 8;
    }
    throw std::invalid_argument("unknown field kind");
}

template <class T> void put(std::ofstream& out, T v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }

template <class T> T get(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw std::runtime_error("truncated field file");
    return v;
}

void check_size(const FieldSnapshot& s) {
    if (s.values.size() != static_cast<std::size_t>(s.n) * s.n * per_site(s.kind))
        throw std::invalid_argument("field snapshot has the wrong number of values");
}

} // namespace

const char* to_string(FieldKind kind) {
    switch (kind) {
    case FieldKind::scalar: return "scalar";
    case FieldKind::section: return "section";
    case FieldKind::herm2: return "herm2";
    }
    return "?";
}

FieldSnapshot snapshot(const ScalarField& f) {
    return {f.grid.n(), f.grid.volume(), 0, FieldKind::scalar, f.values};
}

FieldSnapshot snapshot(const SectionField& s) {
    FieldSnapshot out{s.grid().n(), s.grid().volume(), s.link->degree(), FieldKind::section, {}};
    out.values.reserve(2 * s.values.size());
    for (const cplx& z : s.values) {
        out.values.push_back(z.real());
        out.values.push_back(z.imag());
    }
    return out;
}

FieldSnapshot snapshot(const CurvatureField& f) {
    FieldSnapshot out{f.grid.n(), f.grid.volume(), 0, FieldKind::herm2, {}};
    out.values.reserve(8 * f.values.size());
    for (const auto& m : f.values)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                out.values.push_back(m(i, j).real());
                out.values.push_back(m(i, j).imag());
            }
    return out;
}

ScalarField to_scalar(const FieldSnapshot& snap) {
    if (snap.kind != FieldKind::scalar) throw std::invalid_argument("snapshot is not a scalar field");
    check_size(snap);
    ScalarField f(make_grid(snap.n, snap.volume));
    f.values = snap.values;
    return f;
}

SectionField to_section(const FieldSnapshot& snap) {
    if (snap.kind != FieldKind::section) throw std::invalid_argument("snapshot is not a section field");
    check_size(snap);
    SectionField s(background_connection(make_grid(snap.n, snap.volume), snap.degree));
    for (std::size_t k = 0; k < s.values.size(); ++k) s.values[k] = {snap.values[2 * k], snap.values[2 * k + 1]};
    return s;
}

void write_binary(const std::string& path, const FieldSnapshot& snap) {
    check_size(snap);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write(kMagic, 4);
    put<std::uint32_t>(out, kVersion);
    put<std::int32_t>(out, snap.n);
    put<double>(out, snap.volume);
    put<std::int32_t>(out, snap.degree);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(snap.kind));
    out.write(reinterpret_cast<const char*>(snap.values.data()),
              static_cast<std::streamsize>(snap.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed for " + path);
}

FieldSnapshot read_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error(path + " is not a field file");
    if (get<std::uint32_t>(in) != kVersion) throw std::runtime_error("unsupported field file version");
    FieldSnapshot s;
    s.n = get<std::int32_t>(in);
    s.volume = get<double>(in);
    s.degree = get<std::int32_t>(in);
    const auto kind = get<std::uint32_t>(in);
    if (kind > 2) throw std::runtime_error("unknown field kind in " + path);
    s.kind = static_cast<FieldKind>(kind);
    make_grid(s.n, s.volume);
    s.values.resize(static_cast<std::size_t>(s.n) * s.n * per_site(s.kind));
    in.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(s.values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated field file");
    return s;
}

nlohmann::json to_json(const FieldSnapshot& snap) {
    return {{"n", snap.n}, {"volume", snap.volume}, {"degree", snap.degree},
            {"kind", to_string(snap.kind)}, {"values", snap.values}};
}

FieldSnapshot from_json(const nlohmann::json& j) {
    FieldSnapshot s;
    s.n = j.at("n").get<int>();
    s.volume = j.at("volume").get<double>();
    s.degree = j.at("degree").get<int>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "scalar")
        s.kind = FieldKind::scalar;
    else if (kind == "section")
        s.kind = FieldKind::section;
    else if (kind == "herm2")
        s.kind = FieldKind::herm2;
    else
        throw std::invalid_argument("unknown field kind '" + kind + "'");
    s.values = j.at("values").get<std::vector<double>>();
    check_size(s);
    return s;
}

} // namespace hnlab
