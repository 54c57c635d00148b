#pragma once

#include "orlicz/abstract_renorm.hpp"
#include "orlicz/counterexample.hpp"
#include "orlicz/error.hpp"
#include "orlicz/io.hpp"
#include "orlicz/log_real.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/polyhedral_renorm.hpp"
#include "orlicz/report.hpp"
#include "orlicz/sequence_space.hpp"
#include "orlicz/suite.hpp"
