#pragma once

#include "jacobi_tail/approximation.hpp"
#include "jacobi_tail/config.hpp"
#include "jacobi_tail/errors.hpp"
#include "jacobi_tail/estimator.hpp"
#include "jacobi_tail/experiment.hpp"
#include "jacobi_tail/logsumexp.hpp"
#include "jacobi_tail/lower_tail.hpp"
#include "jacobi_tail/oracle.hpp"
#include "jacobi_tail/parallel.hpp"
#include "jacobi_tail/params.hpp"
#include "jacobi_tail/sampling.hpp"
#include "jacobi_tail/specfn.hpp"
#include "jacobi_tail/tridiag.hpp"
#include "jacobi_tail/validate.hpp"
