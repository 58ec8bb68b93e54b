// Deterministic SVG rendering: tilings as one polygon per lozenge on the
// triangular lattice, and slope fields as horizontal-density heat maps with
// hatched frozen cells.  Output is a pure function of (input, style): fixed
// iteration order and fixed-precision number formatting give byte-identical
// documents across runs and platforms.
#pragma once

#include "loz/asymptotics.hpp"
#include "loz/core.hpp"

#include <string>

namespace loz {

struct RenderStyle {
    std::string color_hor = "#606060";
    std::string color_up = "#9ecae1";
    std::string color_down = "#fdae6b";
    double scale = 24.0;        // pixels per lattice unit
    double stroke_width = 0.6;  // outline width in pixels
};

// Throws ShapeMismatch unless the three colors are distinct and the scale is
// positive.
void validate_style(const RenderStyle& style);

// Complete tiling of the trapezoid: every lozenge becomes one filled
// polygon, horizontal ones at the pattern's entry positions.  Level n grows
// upward.  The document is SVG 1.1 with width/height derived from the
// pattern's bounding box and the style scale.
std::string render_svg(const GTPattern& p, const RenderStyle& style = {});

// Heat map of the horizontal density over a classified grid: one rectangle
// per grid node, brightness interpolating from white (p_hor = 0) to the
// horizontal fill color (p_hor = 1); frozen and degenerate nodes carry a
// diagonal hatch overlay.  A legend with the color ramp and the hatch
// swatch is embedded below the grid.  Throws ShapeMismatch on an empty
// field.
std::string render_slope_field(const SlopeField& field,
                               const RenderStyle& style = {});

}  // namespace loz
