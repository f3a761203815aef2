#pragma once

#include <vector>

// Generated by tests/oracles/gen_oracles.py.
namespace oracle {

inline const std::vector<double> kBurgersB{-0.17500000000000021, 0.79999999999999982, 0.75000000000000011, -0.34999999999999981, -0.37500000000000006, 0.13499999999999981};
inline const std::vector<double> kSymProduct{-0.14000000000000012, 0.22, 0.54000000000000048, 1.5400000000000005, -0.19999999999999996, -0.66000000000000014};
inline const std::vector<double> kGalerkinTerminal{1.1228668932196708, -0.2829488933133199, -0.0052272429566562698, 0.061068500572655254, -0.065493141709390079, 0.047141036407548444, -0.026199159425977225, 0.010410837262636613};

}  // namespace oracle
