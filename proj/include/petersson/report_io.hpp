#pragma once

// Report serialization.  Output must be byte-stable across runs and worker
// counts, so doubles are always printed with 17 significant digits through
// one code path and object fields keep a fixed order.

#include <cstdio>
#include <cstdint>
#include <string>

#include "petersson/certified.hpp"
#include "petersson/moments.hpp"

namespace petersson::report {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Minimal ordered JSON writer: append key/value pairs, close, serialize.
class json_object {
  public:
    void field(const std::string& key, double v) { raw(key, format_double(v)); }
    void field(const std::string& key, std::int64_t v) { raw(key, std::to_string(v)); }
    void field(const std::string& key, int v) { raw(key, std::to_string(v)); }
    void field(const std::string& key, const std::string& v) { raw(key, "\"" + v + "\""); }
    void field(const std::string& key, const char* v) { raw(key, std::string("\"") + v + "\""); }
    void raw(const std::string& key, const std::string& body) {
        if (!first_) out_ += ',';
        first_ = false;
        out_ += '"';
        out_ += key;
        out_ += "\":";
        out_ += body;
    }
    std::string str() const { return "{" + out_ + "}"; }

  private:
    std::string out_;
    bool first_ = true;
};

inline std::string certified_json(const certified_value& cv) {
    json_object o;
    o.field("value", cv.value);
    o.field("tail_bound", cv.tail_bound);
    o.field("terms_used", cv.terms_used);
    return o.str();
}

inline std::string x_policy_name(moments::x_policy p) {
    switch (p) {
        case moments::x_policy::balanced: return "balanced";
        case moments::x_policy::series_optimal: return "auto";
        case moments::x_policy::explicit_value: return "explicit";
    }
    return "balanced";
}

inline std::string moment_report_json(const moments::moment_report& r) {
    json_object query;
    query.field("d", r.query.d);
    query.field("p", r.query.p);
    query.field("D", r.query.discriminant);
    query.field("x_policy", x_policy_name(r.query.policy));
    query.field("x_dp2", r.x_dp2);
    query.field("x_dp", r.x_dp);

    auto sums_json = [](const std::map<moments::sum_key, certified_value>& sums) {
        json_object o;
        for (const auto& [key, cv] : sums)
            o.raw(std::to_string(key.level) + "," + std::to_string(key.q), certified_json(cv));
        return o.str();
    };

    json_object root;
    root.raw("query", query.str());
    root.raw("a_sums", sums_json(r.a_sums));
    root.raw("b_sums", sums_json(r.b_sums));
    root.raw("moment_dp2", certified_json(r.moment_dp2));
    root.raw("moment_dp", certified_json(r.moment_dp));
    root.raw("newform_moment", certified_json(r.newform_moment));
    root.field("envelope", r.envelope);
    root.field("certificate", r.certificate == moments::certificate_state::certified
                                  ? "Certified"
                                  : "NotCertified");
    return root.str();
}

inline std::string moment_report_csv_header() {
    return "d,p,D,x_dp2,x_dp,moment_dp2,moment_dp2_tail,moment_dp,moment_dp_tail,"
           "newform_moment,newform_tail,terms_used,envelope,certificate";
}

inline std::string moment_report_csv(const moments::moment_report& r) {
    std::string row;
    row += std::to_string(r.query.d) + "," + std::to_string(r.query.p) + "," +
           std::to_string(r.query.discriminant) + ",";
    row += format_double(r.x_dp2) + "," + format_double(r.x_dp) + ",";
    row += format_double(r.moment_dp2.value) + "," + format_double(r.moment_dp2.tail_bound) + ",";
    row += format_double(r.moment_dp.value) + "," + format_double(r.moment_dp.tail_bound) + ",";
    row += format_double(r.newform_moment.value) + "," + format_double(r.newform_moment.tail_bound) + ",";
    row += std::to_string(r.newform_moment.terms_used) + ",";
    row += format_double(r.envelope) + ",";
    row += r.certificate == moments::certificate_state::certified ? "Certified" : "NotCertified";
    return row;
}

inline std::string error_json(const std::string& kind, const std::string& message) {
    json_object o;
    o.field("error", kind);
    o.field("message", message);
    return o.str();
}

}  // namespace petersson::report
