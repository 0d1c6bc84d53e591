#![allow(dead_code)]

pub mod plain_search;
