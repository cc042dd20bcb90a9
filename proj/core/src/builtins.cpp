#include "levyme/builtins.hpp"

namespace levyme {

MERep paper_sec7_horizon() {
    RealMatrix T(3, {0.0, -17.0, 17.0, 3.0, 2.0, -6.0, 2.0, 2.0, -5.0});
    RealVector alpha{-8.0 / 9.0, -34.0 / 9.0, 17.0 / 3.0};
    RealVector t{0.0, 1.0, 1.0}; // = -T 1
    return MERep::make(std::move(alpha), std::move(T), std::move(t));
}

} // namespace levyme
