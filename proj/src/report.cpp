#include "hybridq/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hybridq/config_io.hpp"
#include "hybridq/errors.hpp"
#include "hybridq/version.hpp"

namespace hybridq::report {

std::string cell(double v, int decimals) {
    if (!std::isfinite(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string cell(long long v) { return std::to_string(v); }

std::string to_csv(const Table& t, const Provenance& p) {
    std::ostringstream os;
    os << "# " << kToolName << ' ' << kVersion << " preset=" << p.preset
       << " config_hash=" << p.config_hash << " seed=" << p.seed << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
    return os.str();
}

// --- SVG --------------------------------------------------------------------

namespace {

constexpr double kW = 640, kH = 400, kLeft = 70, kRight = 170, kTop = 40, kBottom = 55;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;
    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); }
    double py(double y) const { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); }
};

Frame frame_for(std::vector<double> xs, std::vector<double> ys) {
    Frame f{0, 1, 0, 1};
    if (!xs.empty()) {
        f.x0 = *std::min_element(xs.begin(), xs.end());
        f.x1 = *std::max_element(xs.begin(), xs.end());
    }
    if (!ys.empty()) f.y1 = *std::max_element(ys.begin(), ys.end());
    f.y0 = 0.0;
    if (f.x1 <= f.x0) f.x1 = f.x0 + 1.0;
    if (f.y1 <= f.y0) f.y1 = f.y0 + 1.0;
    f.y1 *= 1.05;
    return f;
}

void axes(std::ostringstream& os, const Frame& f, const std::string& title, const std::string& xl,
          const std::string& yl) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << kW / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << escape(title) << "</text>\n";
    const double xa = kLeft, xb = kW - kRight, ya = kTop, yb = kH - kBottom;
    os << "<path d=\"M" << xa << ' ' << ya << " V" << yb << " H" << xb
       << "\" stroke=\"black\" fill=\"none\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / 5.0;
        const double yv = f.y0 + (f.y1 - f.y0) * i / 5.0;
        os << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << yb + 16
           << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
        os << "<text x=\"" << xa - 6 << "\" y=\"" << num(f.py(yv) + 4)
           << "\" text-anchor=\"end\">" << num(yv) << "</text>\n";
        os << "<line x1=\"" << xa << "\" x2=\"" << xb << "\" y1=\"" << num(f.py(yv)) << "\" y2=\""
           << num(f.py(yv)) << "\" stroke=\"#ddd\"/>\n";
    }
    os << "<text x=\"" << (xa + xb) / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\">"
       << escape(xl) << "</text>\n";
    os << "<text transform=\"translate(18," << (ya + yb) / 2
       << ") rotate(-90)\" text-anchor=\"middle\">" << escape(yl) << "</text>\n";
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series) {
    std::vector<double> xs, ys;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            if (!std::isfinite(y)) continue;
            xs.push_back(x);
            ys.push_back(y);
        }
    }
    const Frame f = frame_for(xs, ys);
    std::ostringstream os;
    axes(os, f, title, x_label, y_label);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        bool first = true;
        for (auto [x, y] : series[i].points) {
            if (!std::isfinite(y)) continue;
            os << (first ? "" : " ") << num(f.px(x)) << ',' << num(f.py(y));
            first = false;
        }
        os << "\"/>\n";
        const double ly = kTop + 16.0 * static_cast<double>(i);
        os << "<rect x=\"" << kW - kRight + 12 << "\" y=\"" << ly << "\" width=\"12\" height=\"3\" fill=\""
           << color << "\"/><text x=\"" << kW - kRight + 30 << "\" y=\"" << ly + 5 << "\">"
           << escape(series[i].label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string bubble_chart(const std::string& title, const std::string& x_label,
                         const std::string& y_label, const std::vector<Bubble>& bubbles) {
    std::vector<double> xs, ys;
    double biggest = 0.0;
    for (const auto& b : bubbles) {
        xs.push_back(b.x);
        ys.push_back(b.y);
        if (std::isfinite(b.size)) biggest = std::max(biggest, b.size);
    }
    Frame f = frame_for(xs, ys);
    // Pad so edge bubbles stay inside the plot.
    const double padx = (f.x1 - f.x0) * 0.1, pady = (f.y1 - f.y0) * 0.1;
    f.x0 -= padx;
    f.x1 += padx;
    f.y0 = ys.empty() ? 0.0 : *std::min_element(ys.begin(), ys.end()) - pady;
    std::ostringstream os;
    axes(os, f, title, x_label, y_label);
    for (const auto& b : bubbles) {
        if (!std::isfinite(b.size)) continue;
        const double r = biggest > 0.0 ? 22.0 * std::sqrt(b.size / biggest) : 0.0;
        os << "<circle cx=\"" << num(f.px(b.x)) << "\" cy=\"" << num(f.py(b.y)) << "\" r=\""
           << num(r) << "\" fill=\"#1f77b4\" fill-opacity=\"0.5\" stroke=\"#1f77b4\"/>\n";
        os << "<text x=\"" << num(f.px(b.x)) << "\" y=\"" << num(f.py(b.y) + 4)
           << "\" text-anchor=\"middle\" font-size=\"10\">" << num(b.size) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

// --- files ------------------------------------------------------------------

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

void write_output(const Output& out, const std::filesystem::path& dir, std::uint64_t seed) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    const Provenance prov{out.preset, io::config_hash(out.parameters), seed};
    nlohmann::json files = nlohmann::json::array();
    for (const Table& t : out.tables) {
        const std::string name = t.name + ".csv";
        write_file(dir / name, to_csv(t, prov));
        files.push_back(name);
    }
    for (const Chart& c : out.charts) {
        const std::string name = c.name + ".svg";
        write_file(dir / name, c.svg);
        files.push_back(name);
    }

    nlohmann::json stamp = {{"tool", kToolName},
                            {"version", kVersion},
                            {"preset", out.preset},
                            {"config_hash", prov.config_hash},
                            {"seed", seed}};
    nlohmann::json summary = stamp;
    summary["results"] = out.summary;
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    files.push_back("summary.json");

    nlohmann::json manifest = stamp;
    manifest["parameters"] = out.parameters;
    manifest["files"] = files;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace hybridq::report
