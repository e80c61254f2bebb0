#include "weaksync/plot.hpp"

#include "weaksync/errors.hpp"
#include "weaksync/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace weaksync {

namespace {

constexpr int kWidth = 900;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 45;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Series {
    std::string label;
    std::vector<double> values;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string render(const std::string& title, const std::vector<double>& times,
                   const std::vector<Series>& series) {
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const Series& s : series)
        for (double v : s.values) {
            if (!any) {
                lo = hi = v;
                any = true;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (!any) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        hi += 0.5;
        lo -= 0.5;
    }
    const double t0 = times.front();
    const double t1 = times.back();
    const double tw = (t1 - t0) > 0 ? (t1 - t0) : 1.0;
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;

    auto px = [&](double t) { return kMarginLeft + (t - t0) / tw * plot_w; };
    auto py = [&](double v) { return kMarginTop + (hi - v) / (hi - lo) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    // axes
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << kHeight - kMarginBottom << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\""
        << kWidth - kMarginRight << "\" y2=\"" << kHeight - kMarginBottom
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << kMarginTop + 5
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(hi)
        << "</text>\n";
    svg << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << kHeight - kMarginBottom
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(lo)
        << "</text>\n";
    svg << "<text x=\"" << kMarginLeft << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t0)
        << "</text>\n";
    svg << "<text x=\"" << kWidth - kMarginRight << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t1)
        << "</text>\n";

    int color = 0;
    for (const Series& s : series) {
        svg << "<polyline fill=\"none\" stroke=\"" << kPalette[color % 10]
            << "\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (i)
                svg << " ";
            svg << fmt(px(times[i])) << "," << fmt(py(s.values[i]));
        }
        svg << "\"><title>" << s.label << "</title></polyline>\n";
        ++color;
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace

std::vector<std::string> emit_plots(const Trajectory& tr, const SyncReport& rep,
                                    const std::string& out_dir) {
    if (tr.samples() == 0 || tr.n_agents == 0)
        throw ValidationError("cannot plot an empty trajectory");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + out_dir + ": " +
                                 ec.message());

    std::vector<std::string> written;

    std::vector<Series> zeta_series;
    for (int i = 0; i < tr.n_agents; ++i) {
        Series s;
        s.label = "agent " + std::to_string(i + 1);
        s.values.resize(tr.samples());
        for (int t = 0; t < tr.samples(); ++t)
            s.values[t] = tr.agent_signals(i).col(t).cwiseAbs().maxCoeff();
        zeta_series.push_back(std::move(s));
    }
    const std::string zeta_path = out_dir + "/zeta.svg";
    write_file(zeta_path, render("network signals |zeta_i(t)|", tr.times, zeta_series));
    written.push_back(zeta_path);

    for (const SyncReport::Group& g : rep.groups) {
        std::vector<Series> series;
        for (std::size_t a = 0; a < g.nodes.size(); ++a) {
            for (std::size_t b = a + 1; b < g.nodes.size(); ++b) {
                Series s;
                s.label = "|y_" + std::to_string(g.nodes[a] + 1) + " - y_" +
                          std::to_string(g.nodes[b] + 1) + "|";
                s.values.resize(tr.samples());
                for (int t = 0; t < tr.samples(); ++t)
                    s.values[t] = (tr.agent_outputs(g.nodes[a]).col(t) -
                                   tr.agent_outputs(g.nodes[b]).col(t))
                                      .cwiseAbs()
                                      .maxCoeff();
                series.push_back(std::move(s));
            }
        }
        for (int c = 0; c < g.y_sync.rows(); ++c) {
            Series s;
            s.label = "y_sync[" + std::to_string(c) + "]";
            s.values.resize(tr.samples());
            for (int t = 0; t < tr.samples(); ++t)
                s.values[t] = g.y_sync(c, t);
            series.push_back(std::move(s));
        }
        const std::string path =
            out_dir + "/bicomponent_" + std::to_string(g.bicomponent + 1) + ".svg";
        write_file(path, render("basic bicomponent " + std::to_string(g.bicomponent + 1) +
                                    ": disagreement and synchronized output",
                                tr.times, series));
        written.push_back(path);
    }
    return written;
}

} // namespace weaksync
