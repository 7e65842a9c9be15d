#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "angspec/field.hpp"

namespace angspec
{

// Self-contained line plot of a profile; byte-deterministic for fixed input.
inline std::string profile_svg(const IntensityProfile& p, const std::string& title)
{
    const int W = 720, H = 420;
    const int L = 64, R = 16, T = 32, B = 44;
    const double pw = W - L - R, ph = H - T - B;

    double x0 = p.x.front(), x1 = p.x.back();
    double y0 = 0.0, y1 = 0.0;
    for (double v : p.intensity) y1 = std::max(y1, v);
    if (y1 <= 0.0) y1 = 1.0;
    y1 *= 1.05;

    char buf[128];
    auto fmt = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };
    auto px = [&](double x) { return L + pw * (x - x0) / (x1 - x0); };
    auto py = [&](double y) { return T + ph * (1.0 - (y - y0) / (y1 - y0)); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"14\">"
       << title << "</text>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << fmt(pw) << "\" height=\""
       << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double xx = x0 + (x1 - x0) * i / 4.0;
        const double sx = px(xx);
        os << "<line x1=\"" << fmt(sx) << "\" y1=\"" << T + ph << "\" x2=\"" << fmt(sx)
           << "\" y2=\"" << fmt(T + ph + 5) << "\" stroke=\"black\"/>\n";
        std::snprintf(buf, sizeof buf, "%.3g", xx * 1e3);
        os << "<text x=\"" << fmt(sx) << "\" y=\"" << T + ph + 20
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << buf
           << "</text>\n";
        const double yy = y0 + (y1 - y0) * i / 4.0;
        const double sy = py(yy);
        os << "<line x1=\"" << fmt(static_cast<double>(L) - 5) << "\" y1=\"" << fmt(sy)
           << "\" x2=\"" << L << "\" y2=\"" << fmt(sy) << "\" stroke=\"black\"/>\n";
        std::snprintf(buf, sizeof buf, "%.3g", yy);
        os << "<text x=\"" << L - 8 << "\" y=\"" << fmt(sy + 4)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << buf
           << "</text>\n";
    }
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 8
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">x (mm)</text>\n";

    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.2\" points=\"";
    for (std::size_t j = 0; j < p.x.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(p.x[j]), py(p.intensity[j]));
        os << buf;
    }
    os << "\"/>\n</svg>\n";
    return os.str();
}

} // namespace angspec
