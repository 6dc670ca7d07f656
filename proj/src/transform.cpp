#include "sgfrwt/transform.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sgfrwt {

namespace {

Eigen::VectorXd band_kernel_values(const FilterBank& bank, int band, const Eigen::VectorXd& r) {
    Eigen::VectorXd k(r.size());
    for (int i = 0; i < r.size(); ++i) k[i] = bank.eval_band(band, r[i]);
    return k;
}

void require_valid_frame(const FilterBank& bank) {
    const auto [a, b] = frame_bounds(bank);
    if (!(a > 0.0)) {
        throw FrameFailure("frame lower bound is not positive (A=" + std::to_string(a) + ")");
    }
    (void)b;
}

} // namespace

CoefficientPyramid forward_exact(const Eigen::VectorXcd& f, const FractionalOperator& op,
                                 const FilterBank& bank) {
    if (f.size() != op.size()) throw DimensionMismatch("signal length does not match operator");
    require_valid_frame(bank);

    CoefficientPyramid p;
    p.theta = op.theta();
    p.scales = bank.scales;
    p.bands.reserve(bank.bands());

    const Eigen::VectorXcd f_hat = op.apply_gamma_adjoint(f);
    for (int b = 0; b < bank.bands(); ++b) {
        const Eigen::VectorXd k = band_kernel_values(bank, b, op.r());
        p.bands.push_back(op.apply_gamma(k.array() * f_hat.array()));
    }
    return p;
}

CoefficientPyramid forward_exact(const Eigen::VectorXd& f, const FractionalOperator& op,
                                 const FilterBank& bank) {
    return forward_exact(Eigen::VectorXcd(f.cast<std::complex<double>>()), op, bank);
}

Eigen::VectorXcd atom(const FractionalOperator& op, const FilterBank& bank, int band, int center) {
    if (band < 0 || band >= bank.bands()) throw IndexOutOfRange("band index out of range");
    if (center < 0 || center >= op.size()) throw IndexOutOfRange("center vertex out of range");
    Eigen::VectorXcd delta = Eigen::VectorXcd::Zero(op.size());
    delta[center] = 1.0;
    const Eigen::VectorXd k = band_kernel_values(bank, band, op.r());
    return op.apply_filter(k, delta);
}

Eigen::VectorXd inverse_exact(const CoefficientPyramid& p, const FractionalOperator& op,
                              const FilterBank& bank) {
    if (p.n_bands() != bank.bands()) throw DimensionMismatch("pyramid and bank disagree on band count");
    if (p.n_vertices() != op.size()) throw DimensionMismatch("pyramid size does not match operator");
    require_valid_frame(bank);

    const int n = op.size();
    Eigen::VectorXd frame = Eigen::VectorXd::Zero(n);
    Eigen::VectorXcd numerator = Eigen::VectorXcd::Zero(n);
    for (int b = 0; b < bank.bands(); ++b) {
        const Eigen::VectorXd k = band_kernel_values(bank, b, op.r());
        frame.array() += k.array().square();
        numerator.array() += k.array() * op.apply_gamma_adjoint(p.bands[b]).array();
    }
    const double floor = 1e-14 * frame.maxCoeff();
    for (int i = 0; i < n; ++i) {
        if (!(frame[i] > floor)) {
            throw FrameFailure("frame function vanishes on the fractional spectrum");
        }
    }
    return op.apply_gamma(numerator.cwiseQuotient(frame.cast<std::complex<double>>())).real();
}

void write_pyramid_csv(const CoefficientPyramid& p, const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& header) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write pyramid " + path);
    out.precision(17);
    out << "# theta=" << p.theta << "\n";
    out << "# scales=";
    for (std::size_t i = 0; i < p.scales.size(); ++i) out << (i ? "," : "") << p.scales[i];
    out << "\n";
    for (const auto& [k, v] : header) out << "# " << k << "=" << v << "\n";
    out << "band,vertex,re,im\n";
    for (int b = 0; b < p.n_bands(); ++b) {
        for (int v = 0; v < p.n_vertices(); ++v) {
            out << b << "," << v << "," << p.bands[b][v].real() << "," << p.bands[b][v].imag()
                << "\n";
        }
    }
    if (!out) throw IoError("write failed for " + path);
}

CoefficientPyramid read_pyramid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open pyramid " + path);
    CoefficientPyramid p;
    std::string line;
    std::vector<std::tuple<int, int, double, double>> rows;
    int max_band = -1, max_vertex = -1;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (line.rfind("# theta", 0) == 0 && eq != std::string::npos) {
                p.theta = std::stod(line.substr(eq + 1));
            } else if (line.rfind("# scales", 0) == 0 && eq != std::string::npos) {
                std::istringstream ss(line.substr(eq + 1));
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    if (!tok.empty()) p.scales.push_back(std::stod(tok));
                }
            }
            continue;
        }
        if (!header_seen) {
            if (line.rfind("band,vertex", 0) != 0) {
                throw UnsupportedFormat("pyramid CSV missing band,vertex,re,im header");
            }
            header_seen = true;
            continue;
        }
        std::istringstream ss(line);
        std::string tok;
        int vals_i[2];
        double vals_d[2];
        try {
            for (int c = 0; c < 4; ++c) {
                if (!std::getline(ss, tok, ',')) {
                    throw UnsupportedFormat("short pyramid row: " + line);
                }
                if (c < 2) vals_i[c] = std::stoi(tok);
                else vals_d[c - 2] = std::stod(tok);
            }
        } catch (const std::invalid_argument&) {
            throw UnsupportedFormat("malformed pyramid row: " + line);
        } catch (const std::out_of_range&) {
            throw UnsupportedFormat("malformed pyramid row: " + line);
        }
        if (vals_i[0] < 0 || vals_i[1] < 0) {
            throw UnsupportedFormat("negative band or vertex index: " + line);
        }
        rows.emplace_back(vals_i[0], vals_i[1], vals_d[0], vals_d[1]);
        max_band = std::max(max_band, vals_i[0]);
        max_vertex = std::max(max_vertex, vals_i[1]);
    }
    if (rows.empty()) throw TruncatedFile("pyramid CSV has no coefficient rows");
    p.bands.assign(max_band + 1, Eigen::VectorXcd::Zero(max_vertex + 1));
    for (const auto& [b, v, re, im] : rows) {
        p.bands[b][v] = {re, im};
    }
    if (rows.size() != p.total_coefficients()) {
        throw DimensionMismatch("pyramid CSV row count does not match band/vertex grid");
    }
    return p;
}

} // namespace sgfrwt
