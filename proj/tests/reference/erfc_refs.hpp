// Generated by gen_erfc_refs.py (mpmath, 50 significant digits). Do not edit.
#pragma once

#include <array>
#include <utility>

namespace cogmc::test {

inline constexpr std::array<std::pair<double, double>, 23> kErfcRefs{{
    {-6.0, 1.99999999999999997848},
    {-3.0, 1.999977909503001414559},
    {-1.0, 1.842700792949714869341},
    {-0.5, 1.520499877813046537683},
    {-0.0010000000000000000208, 1.001128378790969236403},
    {0.0, 1.0},
    {1.0000000000000000209e-8, 0.9999999887162083290449},
    {0.0010000000000000000208, 0.9988716212090307635966},
    {0.10000000000000000555, 0.8875370839817151015953},
    {0.5, 0.4795001221869534623173},
    {0.9000000000000000222, 0.2030917875771678603353},
    {1.0, 0.1572992070502851306588},
    {1.5, 0.03389485352468927293302},
    {2.0, 0.004677734981047265837931},
    {3.0, 0.00002209049699858544137278},
    {4.0, 1.541725790028001885216e-8},
    {5.0, 1.537459794428034850188e-12},
    {7.5, 2.776649386030569100664e-26},
    {10.0, 2.088487583762544757001e-45},
    {15.0, 7.212994172451206666565e-100},
    {20.0, 5.395865611607900928935e-176},
    {25.0, 8.300172571196522752044e-274},
    {26.0, 5.663192408856142846476e-296},
}};

inline constexpr std::array<std::pair<double, double>, 25> kErfcxRefs{{
    {-8.0, 1.247029816162323376582e+28},
    {-5.0, 144009798674.6610404106},
    {-2.0, 108.9409043899779724124},
    {-0.5, 1.952360489182557093276},
    {-0.0010000000000000000208, 1.001129379919848591729},
    {0.0, 1.0},
    {1.0000000000000000209e-8, 0.9999999887162084290449},
    {0.10000000000000000555, 0.8964569799691266366634},
    {0.5, 0.6156903441929258748708},
    {1.0, 0.4275835761558070044108},
    {2.0, 0.2553956763105057438651},
    {3.7000000000000001776, 0.1474349975371850724704},
    {5.0, 0.1107046377330686263702},
    {10.0, 0.05614099274382258585752},
    {20.0, 0.02817434874105131931865},
    {24.989999999999998437, 0.02255858148229389715841},
    {25.0, 0.0225495724326413589436},
    {25.000099999999999767, 0.02254948237845437172321},
    {26.5, 0.02127504668537110595521},
    {30.0, 0.01879588886141675149713},
    {50.0, 0.01128153626532377250018},
    {100.0, 0.005641613782989432903556},
    {1000.0, 0.0005641893014533876541997},
    {100000.0, 0.000005641895835195468077749},
    {100000000.0, 5.641895835477562587386e-9},
}};

}  // namespace cogmc::test

