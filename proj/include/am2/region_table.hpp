#pragma once

// Reference existence/stability rows for the regions J0..J69 of the published operating diagrams.

#include <array>
#include <optional>
#include <string_view>

namespace am2 {

/// One row: per label (in kLabels order) 'S' stable, 'U' unstable, '.' absent.
struct RegionRow {
    int j;
    std::string_view code;
    std::string_view color;
};

inline constexpr std::array<RegionRow, 70> kRegionRows{{
    {0, "S..............", "Cyan"},
    {1, "U..S...........", "Grey"},
    {2, "UUUSSU.........", "Pink"},
    {3, "SSU............", "Plum"},
    {4, "US.............", "Yellow"},
    {5, "UU.US..........", "Blue"},
    {6, "UU.UU.US.......", "Tan"},
    {7, "UU.UU.SSU......", "White"},
    {8, "UU.SSU.........", "Pink"},
    {9, "UU.UUUSSU......", "White"},
    {10, "UU.UUUSSUUUUUSU", "Magenta"},
    {11, "UU.UU.SSUUUUUSU", "Magenta"},
    {12, "UU.UU.US.UUUUSU", "Wheat"},
    {13, "UU.US....UUSU..", "Gold"},
    {14, "US.......SU....", "Turquoise"},
    {15, "UU.......S.....", "Sienna"},
    {16, "UU.UU....U.S...", "Green"},
    {17, "UU.UU.UU.U.U.S.", "Red"},
    {18, "UU.UU.US.U.U.SU", "Wheat"},
    {19, "UU.UU.SSUU.U.SU", "Magenta"},
    {20, "UU.UUUSSUU.U.SU", "Magenta"},
    {21, "UU.UU.UUUU.U.S.", "Red"},
    {22, "UU.UUUUUUU.U.S.", "Red"},
    {23, "UU.UUU...U.S...", "Green"},
    {24, "UU.SSU...UUSU..", "Brown"},
    {25, "U..US..........", "Blue"},
    {26, "U..SSU.........", "Pink"},
    {27, "UU.UUUSSU....SU", "Magenta"},
    {28, "UU.UU.SSU.U.USU", "Magenta"},
    {29, "UU.UU.US.....SU", "Wheat"},
    {30, "UU.UU.UU.....S.", "Red"},
    {31, "UU.UU.SS.......", "White"},
    {32, "U.....S........", "Violet"},
    {33, "U.....S..UU..SU", "Navy"},
    {34, "S........SU....", "Khaki"},
    {35, "U........S.....", "Sienna"},
    {36, "U.....U..U...S.", "Red"},
    {37, "U..UUUU..U.U.S.", "Red"},
    {38, "U.....S..U...SU", "Navy"},
    {39, "U..UUUS..U.U.SU", "Navy"},
    {40, "UUUUUUSSUU.U.SU", "Magenta"},
    {41, "UUUUUUUUUU.U.S.", "Red"},
    {42, "UUU...UUUU...S.", "Red"},
    {43, "UUU......S.....", "Sienna"},
    {44, "UU....UU.U...S.", "Red"},
    {45, "UU....UUUU...S.", "Red"},
    {46, "UU.UU.UU.U.U.S.", "Red"},
    {47, "SSU......SU....", "Black"},
    {48, "UUUUSU...UUSU..", "Gold"},
    {49, "UUUUUUSSUUUUUSU", "Magenta"},
    {50, "UU.UUUSSUUUUUSU", "Magenta"},
    {51, "UU.UU.SSUUUUUSU", "Magenta"},
    {52, "UU.UU.US.UUUUSU", "Wheat"},
    {53, "UU.SSU...UUSU..", "Coral"},
    {54, "UU.US....UUSU..", "Gold"},
    {55, "US.......SU....", "Turquoise"},
    {56, "UU.UU....U.S...", "Green"},
    {57, "UU.UU.US.U.U.SU", "Wheat"},
    {58, "UU.UU.SSUU.U.SU", "Magenta"},
    {59, "UU.UUUSSUU.U.SU", "Magenta"},
    {60, "UU.UU.SSU....SU", "Magenta"},
    {61, "UU.UU.US.....SU", "Wheat"},
    {62, "UU.UU.UU.....S.", "Red"},
    {63, "UU.UU.US.......", "Tan"},
    {64, "U..US..........", "Blue"},
    {65, "U..UU.US.......", "Tan"},
    {66, "U..UU.UU.....S.", "Red"},
    {67, "U..UU.US.....SU", "Wheat"},
    {68, "U..UU.SSU....SU", "Magenta"},
    {69, "U..UUUSSU....SU", "Magenta"},
}};

[[nodiscard]] inline std::optional<RegionRow> region_row(int j) {
    if (j < 0 || j >= static_cast<int>(kRegionRows.size())) return std::nullopt;
    return kRegionRows[static_cast<std::size_t>(j)];
}

} // namespace am2
