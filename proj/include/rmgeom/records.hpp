#pragma once

#include "rmgeom/field.hpp"
#include "rmgeom/real.hpp"

#include <json.hpp>

#include <complex>
#include <cstdint>
#include <string>

namespace rmgeom {

using Json = nlohmann::ordered_json;

// Exact values travel as strings; reals as decimal strings tagged with the
// number of bits they were computed at.
Json integer_json(const mpz_class& z);
Json rational_json(const mpq_class& q);             // {"num", "den"}
Json real_json(double x);                           // {"dec", "prec_bits": 53}
Json real_json(const Real& x);                      // {"dec", "prec_bits"}
Json complex_json(std::complex<double> z);          // {"re", "im"}
Json field_json(const FieldElement& x);             // {"d", "a", "b"}: a + b omega

// Identity checks: {identity, parameters, lhs, rhs, gap, tolerance, pass}.
struct CheckRecord {
    std::string identity;
    Json parameters = Json::object();
    Json lhs, rhs;
    double gap = 0;
    double tolerance = 0;
    bool pass = false;
};

Json to_json(const CheckRecord& c);

struct RunRecord {
    std::string command;
    Json params = Json::object();
    long precision_bits = 128;
    Json result;
    std::int64_t wall_time_ms = 0;
    std::uint64_t seed = 0;
};

Json to_json(const RunRecord& r);

// False iff some object inside has "pass": false.
bool all_pass(const Json& j);

// One record per line; key order is insertion order, so equal inputs give
// equal bytes.
std::string dump_line(const Json& j);

}  // namespace rmgeom
