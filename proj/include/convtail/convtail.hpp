#ifndef CONVTAIL_CONVTAIL_HPP
#define CONVTAIL_CONVTAIL_HPP

#include "convtail/special_functions.hpp"
#include "convtail/precision.hpp"
#include "convtail/distributions.hpp"
#include "convtail/grid.hpp"
#include "convtail/fft.hpp"
#include "convtail/convolution.hpp"
#include "convtail/quadrature.hpp"
#include "convtail/estimator.hpp"
#include "convtail/experiments.hpp"

#endif  // CONVTAIL_CONVTAIL_HPP
