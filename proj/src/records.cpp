#include "rmgeom/records.hpp"

#include <cmath>
#include <cstdio>

namespace rmgeom {

namespace {

std::string dec17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

Json integer_json(const mpz_class& z) { return z.get_str(); }

Json rational_json(const mpq_class& q) {
    mpq_class c(q);
    c.canonicalize();
    return Json{{"num", c.get_num().get_str()}, {"den", c.get_den().get_str()}};
}

Json real_json(double x) { return Json{{"dec", dec17(x)}, {"prec_bits", 53}}; }

Json real_json(const Real& x) {
    // enough digits to round trip at the value's precision
    const int digits = static_cast<int>(std::ceil(x.precision() * 0.30103)) + 2;
    return Json{{"dec", x.to_string(digits)}, {"prec_bits", x.precision()}};
}

Json complex_json(std::complex<double> z) { return Json{{"re", real_json(z.real())}, {"im", real_json(z.imag())}}; }

Json field_json(const FieldElement& x) {
    return Json{{"d", x.field().d}, {"a", rational_json(x.a())}, {"b", rational_json(x.b())}};
}

Json to_json(const CheckRecord& c) {
    return Json{{"identity", c.identity},   {"parameters", c.parameters}, {"lhs", c.lhs},
                {"rhs", c.rhs},             {"gap", real_json(c.gap)},    {"tolerance", real_json(c.tolerance)},
                {"pass", c.pass}};
}

Json to_json(const RunRecord& r) {
    return Json{{"command", r.command},         {"params", r.params},
                {"precision_bits", r.precision_bits}, {"seed", r.seed},
                {"wall_time_ms", r.wall_time_ms},     {"result", r.result}};
}

bool all_pass(const Json& j) {
    if (j.is_object()) {
        if (auto it = j.find("pass"); it != j.end() && it->is_boolean() && !it->get<bool>()) return false;
        for (const auto& [k, v] : j.items())
            if (!all_pass(v)) return false;
    } else if (j.is_array()) {
        for (const auto& v : j)
            if (!all_pass(v)) return false;
    }
    return true;
}

std::string dump_line(const Json& j) { return j.dump() + "\n"; }

}  // namespace rmgeom
