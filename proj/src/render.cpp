#include "loz/render.hpp"

#include "loz/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <vector>

namespace loz {
namespace {

constexpr double kRow = 0.8660254037844386;  // sqrt(3)/2, lattice row height

/*
 * Sheared lattice vertex (x, n) embeds into the plane as
 * (x + n/2, n*sqrt(3)/2).  The SVG y axis points down, so the emitted y is
 * measured from the top of the bounding box; level n still increases upward
 * on screen.
 */
struct Embed {
    double u_min, v_min, u_max, v_max, scale;

    double px(double u) const { return (u - u_min) * scale; }
    double py(double v) const { return (v_max - v) * scale; }
};

void append(std::string& out, const char* fmt, ...)
    __attribute__((format(printf, 2, 3)));

void append(std::string& out, const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    out += buf;
}

const std::string& fill_for(TileType type, const RenderStyle& style) {
    switch (type) {
        case TileType::kHorizontal: return style.color_hor;
        case TileType::kUp: return style.color_up;
        default: return style.color_down;
    }
}

std::string svg_head(double width, double height) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    append(out,
           "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
           "width=\"%.2f\" height=\"%.2f\" viewBox=\"0 0 %.2f %.2f\">\n",
           width, height, width, height);
    return out;
}

// Midpoint fences around a strictly increasing node list, extended by half a
// step at both ends, so every node owns one cell.
std::vector<double> fences(const std::vector<double>& nodes) {
    const std::size_t n = nodes.size();
    std::vector<double> f(n + 1);
    if (n == 1) {
        f[0] = nodes[0] - 0.5;
        f[1] = nodes[0] + 0.5;
        return f;
    }
    f[0] = nodes[0] - 0.5 * (nodes[1] - nodes[0]);
    for (std::size_t i = 1; i < n; ++i) f[i] = 0.5 * (nodes[i - 1] + nodes[i]);
    f[n] = nodes[n - 1] + 0.5 * (nodes[n - 1] - nodes[n - 2]);
    return f;
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw LozError(ErrCode::ShapeMismatch, "color must be #rrggbb");
}

void parse_color(const std::string& c, int rgb[3]) {
    if (c.size() != 7 || c[0] != '#')
        throw LozError(ErrCode::ShapeMismatch, "color must be #rrggbb");
    for (int i = 0; i < 3; ++i)
        rgb[i] = hex_digit(c[1 + 2 * i]) * 16 + hex_digit(c[2 + 2 * i]);
}

}  // namespace

void validate_style(const RenderStyle& style) {
    if (!(style.scale > 0.0))
        throw LozError(ErrCode::ShapeMismatch, "scale must be positive");
    if (style.stroke_width < 0.0)
        throw LozError(ErrCode::ShapeMismatch, "stroke width must be >= 0");
    if (style.color_hor == style.color_up ||
        style.color_hor == style.color_down ||
        style.color_up == style.color_down)
        throw LozError(ErrCode::ShapeMismatch,
                       "the three lozenge colors must be distinct");
    int rgb[3];
    parse_color(style.color_hor, rgb);
    parse_color(style.color_up, rgb);
    parse_color(style.color_down, rgb);
}

std::string render_svg(const GTPattern& p, const RenderStyle& style) {
    validate_style(style);
    const auto ts = tiles(p);

    Embed e{};
    e.scale = style.scale;
    bool first = true;
    std::vector<std::array<std::pair<long long, int>, 4>> quads;
    quads.reserve(ts.size());
    for (const Tile& t : ts) {
        quads.push_back(tile_corners(t));
        for (const auto& [x, n] : quads.back()) {
            const double u = x + 0.5 * n;
            const double v = n * kRow;
            if (first) {
                e.u_min = e.u_max = u;
                e.v_min = e.v_max = v;
                first = false;
            } else {
                e.u_min = std::min(e.u_min, u);
                e.u_max = std::max(e.u_max, u);
                e.v_min = std::min(e.v_min, v);
                e.v_max = std::max(e.v_max, v);
            }
        }
    }
    const double pad = style.stroke_width + 1.0;
    const double width = (e.u_max - e.u_min) * e.scale + 2 * pad;
    const double height = (e.v_max - e.v_min) * e.scale + 2 * pad;

    std::string out = svg_head(width, height);
    append(out,
           "<g transform=\"translate(%.2f,%.2f)\" stroke=\"#333333\" "
           "stroke-width=\"%.2f\" stroke-linejoin=\"round\">\n",
           pad, pad, style.stroke_width);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out += "<polygon points=\"";
        for (std::size_t k = 0; k < 4; ++k) {
            const auto& [x, n] = quads[i][k];
            append(out, "%s%.2f,%.2f", k ? " " : "", e.px(x + 0.5 * n),
                   e.py(n * kRow));
        }
        append(out, "\" fill=\"%s\"/>\n", fill_for(ts[i].type, style).c_str());
    }
    out += "</g>\n</svg>\n";
    return out;
}

std::string render_slope_field(const SlopeField& field,
                               const RenderStyle& style) {
    validate_style(style);
    if (field.xs.empty() || field.etas.empty() ||
        field.points.size() != field.etas.size())
        throw LozError(ErrCode::ShapeMismatch, "empty or ragged slope field");
    for (const auto& row : field.points)
        if (row.size() != field.xs.size())
            throw LozError(ErrCode::ShapeMismatch, "ragged slope field");

    int dark[3];
    parse_color(style.color_hor, dark);

    const std::vector<double> fx = fences(field.xs);
    const std::vector<double> fe = fences(field.etas);
    const double ux_lo = fx.front(), ux_hi = fx.back();
    const double ue_lo = fe.front(), ue_hi = fe.back();
    // the eta axis is much shorter than the x axis for typical profiles;
    // stretch it so the picture stays readable
    const double sx = style.scale * 10.0;
    const double sy = style.scale * 10.0;
    const double grid_w = (ux_hi - ux_lo) * sx;
    const double grid_h = (ue_hi - ue_lo) * sy;
    const double legend_h = 46.0;
    const double pad = 4.0;
    const double width = grid_w + 2 * pad;
    const double height = grid_h + legend_h + 2 * pad;

    auto ramp = [&](double t, char* buf, std::size_t cap) {
        t = std::clamp(t, 0.0, 1.0);
        const int r = static_cast<int>(std::lround(255 + (dark[0] - 255) * t));
        const int g = static_cast<int>(std::lround(255 + (dark[1] - 255) * t));
        const int b = static_cast<int>(std::lround(255 + (dark[2] - 255) * t));
        std::snprintf(buf, cap, "rgb(%d,%d,%d)", r, g, b);
    };

    std::string out = svg_head(width, height);
    out +=
        "<defs>\n<pattern id=\"hatch\" width=\"6\" height=\"6\" "
        "patternUnits=\"userSpaceOnUse\">\n"
        "<path d=\"M0,6 L6,0\" stroke=\"#444444\" stroke-width=\"1\"/>\n"
        "</pattern>\n</defs>\n";
    append(out, "<g transform=\"translate(%.2f,%.2f)\">\n", pad, pad);

    char color[32];
    for (std::size_t iy = 0; iy < field.etas.size(); ++iy)
        for (std::size_t ix = 0; ix < field.xs.size(); ++ix) {
            const SlopePoint& sp = field.points[iy][ix];
            const double x0 = (fx[ix] - ux_lo) * sx;
            const double x1 = (fx[ix + 1] - ux_lo) * sx;
            // eta grows upward: flip the row into screen coordinates
            const double y0 = (ue_hi - fe[iy + 1]) * sy;
            const double y1 = (ue_hi - fe[iy]) * sy;
            ramp(sp.densities.p_hor, color, sizeof color);
            append(out,
                   "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" "
                   "height=\"%.2f\" fill=\"%s\"/>\n",
                   x0, y0, x1 - x0, y1 - y0, color);
            if (sp.status != PointStatus::kLiquid)
                append(out,
                       "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" "
                       "height=\"%.2f\" fill=\"url(#hatch)\"/>\n",
                       x0, y0, x1 - x0, y1 - y0);
        }

    // legend: ramp swatches 0..1, then the hatch swatch
    const double ly = grid_h + 14.0;
    const int steps = 8;
    const double sw = 18.0;
    for (int i = 0; i < steps; ++i) {
        ramp(static_cast<double>(i) / (steps - 1), color, sizeof color);
        append(out,
               "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"12\" "
               "fill=\"%s\" stroke=\"#999999\" stroke-width=\"0.5\"/>\n",
               i * sw, ly, sw, color);
    }
    append(out,
           "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" "
           "font-size=\"10\">p_hor 0 to 1</text>\n",
           0.0, ly + 24.0);
    append(out,
           "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"12\" "
           "fill=\"#ffffff\" stroke=\"#999999\" stroke-width=\"0.5\"/>\n",
           steps * sw + 16.0, ly, sw);
    append(out,
           "<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"12\" "
           "fill=\"url(#hatch)\"/>\n",
           steps * sw + 16.0, ly, sw);
    append(out,
           "<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" "
           "font-size=\"10\">frozen</text>\n",
           steps * sw + 16.0, ly + 24.0);

    out += "</g>\n</svg>\n";
    return out;
}

}  // namespace loz
