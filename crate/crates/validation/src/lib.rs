//! Holds the `acceptance` test target; run it with
//! `cargo test -p idm-validation --test acceptance`.
