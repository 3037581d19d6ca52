// Command-line front end: every computation in the library, emitting
// machine-readable reports on stdout.
//
// Exit codes: 0 success, 2 precondition violation, 3 certified tail cannot
// meet the requested target within c_max.  Every failure prints a structured
// error object.

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "petersson/petersson.hpp"

namespace {

using namespace petersson;

struct cli_error {
    int exit_code;
    std::string kind;
    std::string message;
};

int fail(const cli_error& e) {
    std::cout << report::error_json(e.kind, e.message) << "\n";
    return e.exit_code;
}

moments::x_policy parse_x(const std::string& text, double& explicit_x) {
    if (text == "balanced") return moments::x_policy::balanced;
    if (text == "auto") return moments::x_policy::series_optimal;
    try {
        explicit_x = std::stod(text);
    } catch (const std::exception&) {
        throw invalid_query("--x must be 'balanced', 'auto' or a positive number");
    }
    return moments::x_policy::explicit_value;
}

std::vector<std::int64_t> parse_list(const std::string& text) {
    std::vector<std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stoll(item));
    return out;
}

void emit_certified(const char* command, const certified_value& cv,
                    const truncation_budget& budget) {
    report::json_object o;
    o.field("command", command);
    o.field("value", cv.value);
    o.field("tail_bound", cv.tail_bound);
    o.field("terms_used", cv.terms_used);
    o.field("c_max", budget.c_max);
    std::cout << o.str() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kloosterman-Bessel series, restricted Petersson trace sums, "
                 "twisted central L-values and certified moment computations"};
    app.require_subcommand(1);

    std::int64_t m = 1, n = 1, c = 1, level = 11, q = 1, d = 2, p = 5, disc = 1;
    int eps = 1, threads = 1;
    std::int64_t cmax = -1;     // unset: 20000 for trace/identity, 600000 for moments
    double target_tail = -1.0;  // unset: report-only for trace/identity, 4.0 for moments
    std::string x_text = "balanced";
    std::string format = "json";
    double envelope_c = 1.0;
    std::int64_t dump_coeffs = 0;
    std::string d_list = "2", p_list = "5", disc_list = "1";

    auto* cmd_kloosterman = app.add_subcommand("kloosterman", "Exact Kloosterman sum S(m,n;c)");
    cmd_kloosterman->add_option("--m", m);
    cmd_kloosterman->add_option("--n", n);
    cmd_kloosterman->add_option("--c", c)->required();

    auto* cmd_bessel = app.add_subcommand("bessel", "Bessel J1 at the argument given by --x");
    cmd_bessel->add_option("--x", x_text)->required();

    auto* cmd_trace = app.add_subcommand(
        "trace", "Restricted trace formula right-hand side (--q 1 for the classical sum)");
    cmd_trace->add_option("--m", m);
    cmd_trace->add_option("--n", n);
    cmd_trace->add_option("--level", level)->required();
    cmd_trace->add_option("--q", q);
    cmd_trace->add_option("--eps", eps);
    cmd_trace->add_option("--cmax", cmax);
    cmd_trace->add_option("--target-tail", target_tail);
    cmd_trace->add_option("--threads", threads);

    auto* cmd_identity = app.add_subcommand("identity", "Certified delta-identity series");
    cmd_identity->add_option("--m", m);
    cmd_identity->add_option("--n", n);
    cmd_identity->add_option("--q", q)->required();
    cmd_identity->add_option("--cmax", cmax);
    cmd_identity->add_option("--target-tail", target_tail);
    cmd_identity->add_option("--threads", threads);

    auto* cmd_afe = app.add_subcommand("afe", "Twisted central L-value via the smoothed series");
    cmd_afe->add_option("--level", level)->required();
    cmd_afe->add_option("--disc", disc);
    cmd_afe->add_option("--x", x_text);
    cmd_afe->add_option("--dump-coeffs", dump_coeffs);

    auto add_moment_options = [&](CLI::App* sub) {
        sub->add_option("--d", d);
        sub->add_option("--p", p);
        sub->add_option("--disc", disc);
        sub->add_option("--x", x_text);
        sub->add_option("--cmax", cmax);
        sub->add_option("--target-tail", target_tail);
        sub->add_option("--threads", threads);
        sub->add_option("--format", format);
        sub->add_option("--envelope-c", envelope_c);
    };
    auto* cmd_moment = app.add_subcommand("moment", "Newform moment report");
    add_moment_options(cmd_moment);
    auto* cmd_certify = app.add_subcommand("certify", "Nonvanishing certificate (moment report)");
    add_moment_options(cmd_certify);

    auto* cmd_sweep = app.add_subcommand("sweep", "Moment reports over a (d, p, D) grid");
    cmd_sweep->add_option("--d", d_list);
    cmd_sweep->add_option("--p", p_list);
    cmd_sweep->add_option("--disc", disc_list);
    cmd_sweep->add_option("--x", x_text);
    cmd_sweep->add_option("--cmax", cmax);
    cmd_sweep->add_option("--target-tail", target_tail);
    cmd_sweep->add_option("--threads", threads);
    cmd_sweep->add_option("--format", format);
    cmd_sweep->add_option("--envelope-c", envelope_c);

    CLI11_PARSE(app, argc, argv);

    try {
        if (format != "json" && format != "csv")
            throw invalid_query("--format must be json or csv");
        const bool moment_command =
            cmd_moment->parsed() || cmd_certify->parsed() || cmd_sweep->parsed();
        if (target_tail < 0.0)
            target_tail = moment_command ? 4.0 : 1e300;
        if (cmax < 0)
            cmax = moment_command ? 600000 : 20000;
        truncation_budget budget{cmax, target_tail};

        if (cmd_kloosterman->parsed()) {
            if (c < 1) throw invalid_query("kloosterman: --c must be positive");
            report::json_object o;
            o.field("value", kloosterman::kloosterman_fast(m, n, c));
            std::cout << o.str() << "\n";
            return 0;
        }
        if (cmd_bessel->parsed()) {
            double z = std::stod(x_text);
            report::json_object o;
            o.field("j1", bessel::j1(z));
            o.field("magnitude_bound", bessel::j1_magnitude_bound(z));
            std::cout << o.str() << "\n";
            return 0;
        }
        if (cmd_trace->parsed()) {
            certified_value cv;
            if (q == 1)
                cv = trace::restricted_trace_rhs(m, n, trace::eigenvalue_spec::classical(level),
                                                 budget, threads);
            else
                cv = trace::single_sign_trace_rhs(m, n, level, q, eps, budget, threads);
            emit_certified("trace", cv, budget);
            return 0;
        }
        if (cmd_identity->parsed()) {
            emit_certified("identity", trace::identity_delta_series(m, n, q, budget, threads),
                           budget);
            return 0;
        }
        if (cmd_afe->parsed()) {
            if (dump_coeffs > 0) {
                auto src = lfunctions::eta_product_coeffs(level, dump_coeffs);
                std::cout << "n,a_n\n";
                for (std::int64_t i = 1; i <= dump_coeffs; ++i)
                    std::cout << i << "," << src.coeff(i) << "\n";
                return 0;
            }
            character::quadratic_character chi(disc);
            const double dflt =
                std::sqrt(static_cast<double>(disc) * static_cast<double>(disc) *
                          static_cast<double>(level));
            double x_val = dflt;
            if (x_text != "balanced" && x_text != "auto") x_val = std::stod(x_text);
            const std::int64_t want = 64 + 8 * static_cast<std::int64_t>(
                std::max(x_val, static_cast<double>(disc * disc * level) / x_val));
            auto src = lfunctions::eta_product_coeffs(level, want);
            report::json_object o;
            o.field("level", level);
            o.field("D", disc);
            o.field("x", x_val);
            o.field("value", lfunctions::afe_central_value(src, chi, x_val));
            std::cout << o.str() << "\n";
            return 0;
        }
        if (cmd_moment->parsed() || cmd_certify->parsed()) {
            moments::moment_query query;
            query.d = d;
            query.p = p;
            query.discriminant = disc;
            query.policy = parse_x(x_text, query.x_explicit);
            auto rep = moments::newform_moment(query, budget, threads, envelope_c);
            if (format == "csv")
                std::cout << report::moment_report_csv_header() << "\n"
                          << report::moment_report_csv(rep) << "\n";
            else
                std::cout << report::moment_report_json(rep) << "\n";
            return 0;
        }
        if (cmd_sweep->parsed()) {
            moments::x_policy policy = moments::x_policy::balanced;
            double x_explicit = 0.0;
            policy = parse_x(x_text, x_explicit);
            const auto ds = parse_list(d_list), ps = parse_list(p_list), qs = parse_list(disc_list);
            bool csv = format == "csv";
            std::string out;
            if (csv) out = report::moment_report_csv_header() + ",row_error\n";
            bool first = true;
            if (!csv) out = "[";
            for (auto dv : ds)
                for (auto pv : ps)
                    for (auto qv : qs) {
                        std::string row;
                        try {
                            moments::moment_query query;
                            query.d = dv;
                            query.p = pv;
                            query.discriminant = qv;
                            query.policy = policy;
                            query.x_explicit = x_explicit;
                            auto rep = moments::newform_moment(query, budget, threads, envelope_c);
                            row = csv ? report::moment_report_csv(rep) + ","
                                      : report::moment_report_json(rep);
                        } catch (const std::exception& e) {
                            if (csv) {
                                row = std::to_string(dv) + "," + std::to_string(pv) + "," +
                                      std::to_string(qv) + ",,,,,,,,,,,," + e.what();
                            } else {
                                report::json_object o;
                                o.field("d", dv);
                                o.field("p", pv);
                                o.field("D", qv);
                                o.field("row_error", e.what());
                                row = o.str();
                            }
                        }
                        if (csv) {
                            out += row + "\n";
                        } else {
                            if (!first) out += ",";
                            out += row;
                            first = false;
                        }
                    }
            if (!csv) out += "]\n";
            std::cout << out;
            if (csv) return 0;
            std::cout << std::flush;
            return 0;
        }
        return fail({2, "InvalidArgument", "no command"});
    } catch (const budget_exceeded& e) {
        return fail({3, "BudgetExceeded", e.what()});
    } catch (const character::not_fundamental& e) {
        return fail({2, "NotFundamental", e.what()});
    } catch (const coprimality_violation& e) {
        return fail({2, "CoprimalityViolation", e.what()});
    } catch (const insufficient_coefficients& e) {
        return fail({2, "InsufficientCoefficients", e.what()});
    } catch (const undecidable& e) {
        return fail({2, "Undecidable", e.what()});
    } catch (const arith::not_invertible& e) {
        return fail({2, "NotInvertible", e.what()});
    } catch (const bessel::quadrature_failure& e) {
        return fail({2, "QuadratureFailure", e.what()});
    } catch (const invalid_query& e) {
        return fail({2, "InvalidQuery", e.what()});
    } catch (const std::invalid_argument& e) {
        return fail({2, "InvalidArgument", e.what()});
    } catch (const std::domain_error& e) {
        return fail({2, "InvalidArgument", e.what()});
    } catch (const std::exception& e) {
        return fail({1, "Internal", e.what()});
    }
}
