// SPDX-License-Identifier: Apache-2.0

//! Performance, power and area models for microring-based photonic CNN
//! accelerators with reconfigurable vector-dot-product elements.

pub mod archmodel;
pub mod bundled;
pub mod cnnworkload;
pub mod combswitch;
pub mod comparison;
pub mod linkbudget;
pub mod mapper;
pub mod simengine;
pub mod units;
