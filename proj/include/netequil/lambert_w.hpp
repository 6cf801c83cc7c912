#pragma once

namespace netequil {

/// Principal branch W0 of the Lambert W function: the w >= -1 with w e^w = x.
///
/// Defined for x >= -1/e; throws DomainError below that.
double lambert_w(double x);

/// W(exp(z)) without forming exp(z), i.e. the root of w + ln w = z.
///
/// Stays finite for arguments whose exponential overflows a double.
double lambert_w_exp(double z);

}  // namespace netequil
