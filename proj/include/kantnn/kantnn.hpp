#pragma once

#include "kantnn/error.hpp"
#include "kantnn/rng.hpp"
#include "kantnn/parallel.hpp"
#include "kantnn/kernels.hpp"
#include "kantnn/grid.hpp"
#include "kantnn/operator.hpp"
#include "kantnn/normspaces.hpp"
#include "kantnn/image.hpp"
#include "kantnn/metrics.hpp"
#include "kantnn/imaging.hpp"
#include "kantnn/io.hpp"
