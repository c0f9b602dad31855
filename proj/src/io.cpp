#include "cflow/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "cflow/errors.hpp"

namespace cflow::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << std::setprecision(17);
    return out;
}

}  // namespace

void write_text(const std::filesystem::path& path, std::string_view text) {
    auto out = open_out(path);
    out << text;
}

void write_modes_csv(const std::filesystem::path& path, const ModeVector& alpha) {
    auto out = open_out(path);
    out << "n,re,im\n";
    for (Index k = 0; k < alpha.size(); ++k) out << k << ',' << alpha[k].real() << ',' << alpha[k].imag() << '\n';
}

ModeVector read_modes_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line.rfind("n,re,im", 0) != 0) throw ValidationError(path.string() + ": expected header n,re,im");
    std::vector<cplx> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        long n = 0;
        double re = 0.0, im = 0.0;
        char c1 = 0, c2 = 0;
        if (!(row >> n >> c1 >> re >> c2 >> im) || c1 != ',' || c2 != ',' ||
            n != static_cast<long>(values.size()))
            throw ValidationError(path.string() + ": malformed row '" + line + "'");
        values.emplace_back(re, im);
    }
    ModeVector alpha(static_cast<Index>(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k) alpha[static_cast<Index>(k)] = values[k];
    return alpha;
}

std::string modes_to_json(const ModeVector& alpha) {
    nlohmann::json j = nlohmann::json::array();
    for (Index k = 0; k < alpha.size(); ++k) j.push_back({alpha[k].real(), alpha[k].imag()});
    return j.dump();
}

ModeVector modes_from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("modes_from_json: ") + e.what());
    }
    if (!j.is_array()) throw ValidationError("modes_from_json: expected an array of [re, im] pairs");
    ModeVector alpha(static_cast<Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto& e = j[k];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
            throw ValidationError("modes_from_json: entry " + std::to_string(k) + " is not a [re, im] pair");
        alpha[static_cast<Index>(k)] = cplx(e[0].get<double>(), e[1].get<double>());
    }
    return alpha;
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& traj,
                          const std::vector<Index>& recorded_modes) {
    auto out = open_out(path);
    out << "t,H,Q,E";
    for (Index k : recorded_modes) out << ",re_" << k << ",im_" << k;
    out << '\n';
    for (std::size_t i = 0; i < traj.samples(); ++i) {
        const auto& c = traj.conserved[i];
        out << traj.times[i] << ',' << c.H << ',' << c.Q << ',' << c.E;
        for (Index k : recorded_modes) {
            const cplx z = traj.states[i].at_or_zero(k);
            out << ',' << z.real() << ',' << z.imag();
        }
        out << '\n';
    }
}

void write_modulation_csv(const std::filesystem::path& path, const ModulationTrack& track) {
    auto out = open_out(path);
    out << "t,c,p,theta,mu,dist_h12,dist_h1,residual\n";
    for (const auto& s : track.samples)
        out << s.t << ',' << s.frame.c << ',' << s.frame.p << ',' << s.frame.theta << ',' << s.frame.mu << ','
            << s.dist_h12 << ',' << s.dist_h1 << ',' << s.frame.constraint_residual << '\n';
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectralReport& report) {
    auto out = open_out(path);
    out << "k,eigenvalue,residual\n";
    for (Index k = 0; k < report.eigenvalues.size(); ++k)
        out << k << ',' << report.eigenvalues(k) << ',' << report.residuals(k) << '\n';
}

}  // namespace cflow::io
