// Map output: portable float maps (PFM, little-endian, lossless) for raw
// values and PPM images through a fixed five-stop color ramp for quick looks.

#pragma once

#include "geom.h"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

namespace offws {

// Grayscale PFM ("Pf"), scale -1 marking little-endian payload. Rows are
// written bottom-up per the format convention.
inline void writePfm(const std::string& path, int width, int height,
                     const std::vector<float>& data) {
    if (int(data.size()) != width * height)
        throw std::invalid_argument("writePfm: data size does not match dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "Pf\n" << width << " " << height << "\n-1.0\n";
    for (int row = height - 1; row >= 0; --row)
        out.write(reinterpret_cast<const char*>(data.data() + size_t(row) * width),
                  std::streamsize(sizeof(float)) * width);
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<float> readPfm(const std::string& path, int& width, int& height) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string magic;
    double scale = 0.0;
    in >> magic >> width >> height >> scale;
    if (magic != "Pf" || scale >= 0)
        throw std::runtime_error("unsupported float map header: " + path);
    in.get();  // newline after the header
    std::vector<float> data(size_t(width) * height);
    for (int row = height - 1; row >= 0; --row)
        in.read(reinterpret_cast<char*>(data.data() + size_t(row) * width),
                std::streamsize(sizeof(float)) * width);
    if (!in) throw std::runtime_error("truncated float map: " + path);
    return data;
}

// Fixed color ramp (dark blue -> teal -> green -> yellow -> white), linear in
// the normalized value.
inline std::array<uint8_t, 3> colormap(double t) {
    static const double stops[5][3] = {{0.05, 0.03, 0.30},
                                       {0.10, 0.40, 0.65},
                                       {0.10, 0.70, 0.40},
                                       {0.95, 0.90, 0.25},
                                       {1.00, 1.00, 1.00}};
    t = std::min(1.0, std::max(0.0, t));
    double x = t * 4.0;
    int k = std::min(3, int(x));
    double f = x - k;
    std::array<uint8_t, 3> rgb{};
    for (int c = 0; c < 3; ++c) {
        double v = stops[k][c] * (1.0 - f) + stops[k + 1][c] * f;
        rgb[c] = uint8_t(std::lround(255.0 * v));
    }
    return rgb;
}

inline void writePpm(const std::string& path, int width, int height,
                     const std::vector<float>& data, double vmin, double vmax) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "P6\n" << width << " " << height << "\n255\n";
    double range = vmax > vmin ? vmax - vmin : 1.0;
    for (int row = height - 1; row >= 0; --row)
        for (int col = 0; col < width; ++col) {
            double t = (double(data[size_t(row) * width + col]) - vmin) / range;
            auto rgb = colormap(t);
            out.write(reinterpret_cast<const char*>(rgb.data()), 3);
        }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace offws
