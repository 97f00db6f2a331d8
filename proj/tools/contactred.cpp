// contactred: command-line front end.
//
// Exit codes: 0 every check passed, 1 some check failed, 2 invalid scene or
// arguments, 3 I/O error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "contactred/commands.hpp"

namespace {

using contactred::IoError;
using contactred::SceneError;

constexpr int kExitFail = 1;
constexpr int kExitScene = 2;
constexpr int kExitIo = 3;

std::optional<std::uint64_t> seed_from_env() {
    const char* v = std::getenv("CONTACTRED_SEED");
    if (!v || !*v) return std::nullopt;
    char* end = nullptr;
    const auto seed = std::strtoull(v, &end, 10);
    if (*end != '\0') throw SceneError(std::string("CONTACTRED_SEED is not an integer: '") + v + "'");
    return seed;
}

std::vector<double> parse_list(const std::string& s, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0') throw SceneError(std::string(flag) + ": not a number: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw SceneError(std::string(flag) + ": empty list");
    return out;
}

std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path + "'");
}

struct Common {
    std::string scene;
    std::string report;
    bool no_timestamp = false;
};

int emit(const contactred::Report& report, const Common& common) {
    auto doc = report.to_json();
    if (!common.no_timestamp) doc["generated_at"] = utc_now();
    const std::string text = doc.dump(2) + "\n";
    if (common.report.empty()) {
        std::cout << text;
    } else {
        write_text(common.report, text);
        std::cerr << (report.passed() ? "PASS" : "FAIL") << " " << doc["command"].get<std::string>() << " -> "
                  << common.report << "\n";
    }
    return report.passed() ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Precontact and contact structures, symplectic covers and their reductions"};
    app.require_subcommand(1);
    // --h names the second bracket operand, so help is long-form only
    app.set_help_flag("--help", "Print this help message and exit");

    Common common;
    auto add_common = [&](CLI::App* sub, bool scene) {
        if (scene) sub->add_option("scene", common.scene, "Scene file (JSON, schema 1)")->required();
        sub->add_option("--report", common.report, "Write the JSON report here instead of stdout");
        sub->add_flag("--no-timestamp", common.no_timestamp, "Omit the generation time from the report");
    };

    auto* check = app.add_subcommand("check", "Precontact criteria and cover identities");
    add_common(check, true);
    auto* reeb = app.add_subcommand("reeb", "Reeb field at sample points");
    add_common(reeb, true);

    contactred::EvolveArgs ev;
    std::string x0;
    std::string csv_out;
    auto* evolve = app.add_subcommand("evolve", "Integrate a contact Hamiltonian flow (RK4)");
    add_common(evolve, true);
    evolve->add_option("--hamiltonian", ev.hamiltonian, "Base function name")->required();
    evolve->add_option("--t0", ev.t0, "Start time");
    evolve->add_option("--t1", ev.t1, "End time");
    evolve->add_option("--dt", ev.dt, "Step size");
    evolve->add_option("--x0", x0, "Initial point, comma separated")->required();
    evolve->add_option("--out", csv_out, "Trajectory CSV path");
    evolve->add_flag("--bounded", ev.bounded, "Fail when the state leaves the chart domain");

    std::string f_name;
    std::string h_name;
    std::size_t n_points = 100;
    auto* bracket = app.add_subcommand("bracket", "Contact Jacobi bracket by two routes");
    add_common(bracket, true);
    bracket->add_option("--f", f_name, "First function")->required();
    bracket->add_option("--h", h_name, "Second function")->required();
    bracket->add_option("--points", n_points, "Number of sample points");

    std::string sub_name;
    auto* classify = app.add_subcommand("classify", "Classify a submanifold");
    add_common(classify, true);
    classify->add_option("--submanifold", sub_name, "Submanifold name")->required();

    std::string action;
    auto* moment = app.add_subcommand("moment", "Moment map identities");
    add_common(moment, true);
    moment->add_option("--action", action, "Action name")->required();

    std::string quotient;
    auto* reduce = app.add_subcommand("reduce", "Verify a reduction against quotient data");
    add_common(reduce, true);
    reduce->add_option("--submanifold", sub_name, "Submanifold name")->required();
    reduce->add_option("--quotient", quotient, "Quotient name")->required();

    std::string mu;
    auto* mwm = app.add_subcommand("mwm", "Reduction at a level of the moment map");
    add_common(mwm, true);
    mwm->add_option("--action", action, "Action name")->required();
    mwm->add_option("--mu", mu, "Level, comma separated")->required();
    mwm->add_option("--quotient", quotient, "Quotient name (default: the action's entry for mu)");

    int dm = 3;
    int dr = 1;
    std::string out_path;
    auto* darboux = app.add_subcommand("darboux", "Write a Darboux model scene");
    darboux->add_option("--m", dm, "Dimension")->required();
    darboux->add_option("--r", dr, "Rank parameter r (rank 2r+1)")->required();
    darboux->add_option("--out", out_path, "Scene path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitScene;
    }

    try {
        if (darboux->parsed()) {
            write_text(out_path, contactred::darboux_scene_json(dm, dr).dump(2) + "\n");
            return 0;
        }
        const auto scene = contactred::load_scene(common.scene, seed_from_env());
        if (check->parsed()) return emit(contactred::run_check(scene), common);
        if (reeb->parsed()) return emit(contactred::run_reeb(scene), common);
        if (evolve->parsed()) {
            ev.x0 = parse_list(x0, "--x0");
            auto result = contactred::run_evolve(scene, ev);
            if (!csv_out.empty() && result.trajectory) {
                std::ostringstream csv;
                result.trajectory->write_csv(csv);
                write_text(csv_out, csv.str());
            }
            return emit(result.report, common);
        }
        if (bracket->parsed()) return emit(contactred::run_bracket(scene, f_name, h_name, n_points), common);
        if (classify->parsed()) return emit(contactred::run_classify(scene, sub_name), common);
        if (moment->parsed()) return emit(contactred::run_moment(scene, action), common);
        if (reduce->parsed()) return emit(contactred::run_reduce(scene, sub_name, quotient), common);
        if (mwm->parsed()) {
            const auto q = quotient.empty() ? std::nullopt : std::optional<std::string>(quotient);
            return emit(contactred::run_mwm(scene, action, parse_list(mu, "--mu"), q), common);
        }
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const SceneError& e) {
        std::cerr << "scene error: " << e.what() << "\n";
        return kExitScene;
    } catch (const contactred::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitScene;
    } catch (const contactred::ParseError& e) {
        std::cerr << "scene error: " << e.what() << " (byte " << e.offset() << ")\n";
        return kExitScene;
    } catch (const contactred::UnknownIdentifier& e) {
        std::cerr << "scene error: unknown identifier '" << e.name() << "'\n";
        return kExitScene;
    } catch (const contactred::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitFail;
}
