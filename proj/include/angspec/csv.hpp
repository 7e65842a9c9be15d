#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "angspec/error.hpp"
#include "angspec/field.hpp"
#include "angspec/fringe_fit.hpp"

namespace angspec
{

// header `x_m,intensity`, one row per sample, %.9e
inline std::string profile_csv(const IntensityProfile& p)
{
    std::ostringstream os;
    os << "x_m,intensity\n";
    char buf[80];
    for (std::size_t j = 0; j < p.x.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.9e,%.9e\n", p.x[j], p.intensity[j]);
        os << buf;
    }
    return os.str();
}

// header `z_m,mu1,mu2,K1,K2,residual`, one row per plane
inline std::string fringe_fit_csv(const std::vector<PlaneVisibility>& planes)
{
    std::ostringstream os;
    os << "z_m,mu1,mu2,K1,K2,residual\n";
    char buf[160];
    for (const PlaneVisibility& pv : planes) {
        std::snprintf(buf, sizeof buf, "%.9e,%.9e,%.9e,%.9e,%.9e,%.9e\n", pv.z, pv.fit.mu1,
                      pv.fit.mu2, pv.fit.K1, pv.fit.K2, pv.fit.residual);
        os << buf;
    }
    return os.str();
}

inline std::string fringe_fit_csv(double z, const FringeFit& fit)
{
    return fringe_fit_csv({PlaneVisibility{z, fit}});
}

inline void write_file(const std::string& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw NumericError("cannot open for writing: " + path);
    out << content;
    if (!out) throw NumericError("write failed: " + path);
}

// expects the header `x_m,intensity`
inline IntensityProfile read_profile_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("x_m,intensity", 0) != 0)
        throw InvalidArgument("not a profile CSV (missing x_m,intensity header): " + path);
    IntensityProfile p;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        double x, I;
        if (std::sscanf(line.c_str(), "%lf,%lf", &x, &I) != 2)
            throw InvalidArgument(path + ": bad CSV row at line " + std::to_string(line_no));
        p.x.push_back(x);
        p.intensity.push_back(I);
    }
    if (p.x.size() < 2) throw InvalidArgument(path + ": too few rows");
    return p;
}

} // namespace angspec
