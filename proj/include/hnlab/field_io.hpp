#pragma once

// Field snapshots: a flat little-endian binary container and a JSON form.
//
// Binary layout: "HNFD", u32 version, i32 n, f64 volume, i32 degree, u32 kind,
// then row-major values (one f64 per site for scalars, re/im pairs for
// sections, 8 f64 per site for 2x2 Hermitian fields: re/im of 00, 01, 10, 11).

#include "hnlab/grid.hpp"
#include "hnlab/hermitian_fields.hpp"

#include <json.hpp>

#include <string>

namespace hnlab {

enum class FieldKind : unsigned { scalar = 0, section = 1, herm2 = 2 };

const char* to_string(FieldKind kind);

struct FieldSnapshot {
    int n = 0;
    double volume = 1.0;
    int degree = 0;
    FieldKind kind = FieldKind::scalar;
    std::vector<double> values;
};

FieldSnapshot snapshot(const ScalarField& f);
FieldSnapshot snapshot(const SectionField& s);
FieldSnapshot snapshot(const CurvatureField& f);

ScalarField to_scalar(const FieldSnapshot& snap);
/// Rebuilds the section over the background connection of the stored degree.
SectionField to_section(const FieldSnapshot& snap);

void write_binary(const std::string& path, const FieldSnapshot& snap);
FieldSnapshot read_binary(const std::string& path);

nlohmann::json to_json(const FieldSnapshot& snap);
FieldSnapshot from_json(const nlohmann::json& j);

} // namespace hnlab
