#pragma once

#include "powerprobe/algorithms.hpp"
#include "powerprobe/bivariate.hpp"
#include "powerprobe/bounds_lab.hpp"
#include "powerprobe/field.hpp"
#include "powerprobe/io.hpp"
#include "powerprobe/oracle.hpp"
#include "powerprobe/poly.hpp"
#include "powerprobe/rational.hpp"
