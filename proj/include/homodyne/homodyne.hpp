#pragma once

#include "homodyne/abel.hpp"
#include "homodyne/budget.hpp"
#include "homodyne/calibration.hpp"
#include "homodyne/dataset.hpp"
#include "homodyne/efficiency_fit.hpp"
#include "homodyne/error.hpp"
#include "homodyne/histogram.hpp"
#include "homodyne/pattern.hpp"
#include "homodyne/reconstruction.hpp"
#include "homodyne/report.hpp"
#include "homodyne/rng.hpp"
#include "homodyne/sampling.hpp"
#include "homodyne/simulator.hpp"
#include "homodyne/smoothing.hpp"
#include "homodyne/states.hpp"
#include "homodyne/summation.hpp"
