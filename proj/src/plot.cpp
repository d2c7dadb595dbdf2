#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "apbm/output.hpp"

namespace apbm::harness {

namespace fs = std::filesystem;

namespace {

constexpr int kWidth = 720;
constexpr int kPanelHeight = 420;
constexpr double kLeft = 80, kRight = 200, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string tick_label(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

// One chart panel with its top-left corner at y_offset.
void render_panel(std::ostream& svg, const std::vector<Series>& series, const std::string& title,
                  const std::string& y_label, double y_offset) {
    std::size_t steps = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : series) {
        steps = std::max(steps, s.values.size());
        for (double v : s.values) {
            if (!std::isfinite(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    const bool log_y = lo > 0.0 && hi / lo > 100.0;
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
    double y0 = ty(lo);
    double y1 = ty(hi);
    if (y1 - y0 < 1e-12) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kPanelHeight - kTop - kBottom;
    const double x_max = std::max<double>(1.0, static_cast<double>(steps));
    auto px = [&](double step) { return kLeft + (step - 1.0) / std::max(1.0, x_max - 1.0) * plot_w; };
    auto py = [&](double v) { return y_offset + kTop + (1.0 - (ty(v) - y0) / (y1 - y0)) * plot_h; };

    svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << y_offset + 24
        << "\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title) << "</text>\n";
    svg << "<rect x=\"" << kLeft << "\" y=\"" << y_offset + kTop << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double frac = i / 4.0;
        const double v = y0 + frac * (y1 - y0);
        const double label = log_y ? std::pow(10.0, v) : v;
        const double yy = y_offset + kTop + (1.0 - frac) * plot_h;
        svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << yy << "\" x2=\"" << kLeft << "\" y2=\"" << yy
            << "\" stroke=\"#333\"/>\n";
        svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << yy + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
            << tick_label(label) << "</text>\n";
        const double step = 1.0 + frac * (x_max - 1.0);
        svg << "<text x=\"" << px(step) << "\" y=\"" << y_offset + kTop + plot_h + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">" << tick_label(std::round(step)) << "</text>\n";
    }
    svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << y_offset + kPanelHeight - 8
        << "\" text-anchor=\"middle\" font-size=\"12\">step</text>\n";
    svg << "<text x=\"18\" y=\"" << y_offset + kTop + plot_h / 2 << "\" font-size=\"12\" transform=\"rotate(-90 18 "
        << y_offset + kTop + plot_h / 2 << ")\" text-anchor=\"middle\">" << xml_escape(y_label)
        << (log_y ? " (log)" : "") << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % std::size(kPalette)];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < series[i].values.size(); ++k) {
            const double v = series[i].values[k];
            if (!std::isfinite(v) || (log_y && v <= 0.0)) continue;
            svg << px(static_cast<double>(k + 1)) << ',' << py(v) << ' ';
        }
        svg << "\"/>\n";
        const double ly = y_offset + kTop + 14 + 18.0 * static_cast<double>(i);
        svg << "<line x1=\"" << kWidth - kRight + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kWidth - kRight + 32
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << kWidth - kRight + 38 << "\" y=\"" << ly << "\" font-size=\"12\">"
            << xml_escape(series[i].key.label()) << "</text>\n";
    }
}

void write_svg(const fs::path& path, int panels, const std::string& body) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw Error(ErrorCode::Io, path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kPanelHeight * panels
        << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << body << "</svg>\n";
    out.close();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace

void emit_plot(const std::vector<Series>& series, const std::string& title, const std::string& y_label,
               const fs::path& path) {
    std::ostringstream body;
    render_panel(body, series, title, y_label, 0.0);
    write_svg(path, 1, body.str());
}

void plot_directory(const fs::path& dir, const fs::path& out) {
    const auto rmse = read_rmse_csv(dir / "rmse.csv");
    std::ostringstream body;
    render_panel(body, rmse, "RMSE over Monte Carlo runs", "RMSE", 0.0);
    int panels = 1;
    if (fs::exists(dir / "theta_var.csv")) {
        render_panel(body, read_theta_var_csv(dir / "theta_var.csv"), "Mean parameter variance", "E[Var(theta)]",
                     kPanelHeight);
        ++panels;
    }
    write_svg(out, panels, body.str());
}

}  // namespace apbm::harness
