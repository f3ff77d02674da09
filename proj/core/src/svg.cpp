#include <algorithm>
#include <cstdio>
#include <fstream>

#include "hccepose/errors.hpp"
#include "hccepose/experiment.hpp"

namespace hcce {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

void write_recall_svg(const std::vector<double>& errors, double diameter,
                      const std::string& title, const std::string& path) {
    if (errors.empty()) throw DegenerateInputError("write_recall_svg: no errors");

    std::vector<double> sorted = errors;
    std::sort(sorted.begin(), sorted.end());
    const double max_threshold = 0.2 * diameter;

    constexpr double w = 480.0, h = 320.0, ml = 50.0, mr = 15.0, mt = 30.0, mb = 40.0;
    const double px = w - ml - mr, py = h - mt - mb;
    auto x_of = [&](double t) { return ml + px * std::min(t / max_threshold, 1.0); };
    auto y_of = [&](double recall) { return mt + py * (1.0 - recall); };

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
        << title << "</text>\n";
    // Axes.
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + py << "\" x2=\"" << ml + px << "\" y2=\""
        << mt + py << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + py
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml + px / 2 << "\" y=\"" << h - 8
        << "\" text-anchor=\"middle\" font-size=\"11\">pose error threshold (m), up to 0.2 x "
           "diameter</text>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double r = tick / 4.0;
        out << "<text x=\"" << ml - 6 << "\" y=\"" << y_of(r) + 4
            << "\" text-anchor=\"end\" font-size=\"10\">" << num(r) << "</text>\n";
    }
    // Step curve of recall vs threshold.
    out << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\" points=\"";
    const double n = static_cast<double>(sorted.size());
    double prev_recall = 0.0;
    out << num(x_of(0.0)) << ',' << num(y_of(0.0)) << ' ';
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double t = sorted[i];
        if (t > max_threshold) break;
        const double recall = static_cast<double>(i + 1) / n;
        out << num(x_of(t)) << ',' << num(y_of(prev_recall)) << ' ';
        out << num(x_of(t)) << ',' << num(y_of(recall)) << ' ';
        prev_recall = recall;
    }
    out << num(x_of(max_threshold)) << ',' << num(y_of(prev_recall));
    out << "\"/>\n</svg>\n";
}

}  // namespace hcce
