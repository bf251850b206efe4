//! Wall-clock cost of the hot paths, bottom of the stack to the top: ring
//! multiplication, the compression hash, signcryption round trips, chain
//! validation, and a whole simulated scenario.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use prodchain_core::{
    lash_compress, ring_mul, run_scenario, seeded_rng, signcrypt, unsigncrypt, validate_chain,
    Chain, Ciphertext, DocumentType, GroupElement, GroupParams, GroupScalar, KeyPair, Plaintext,
    ProofMetrics, RingElement, RingParams, Scenario, StakeholderRole,
};

use rand_chacha::rand_core::RngCore;

fn random_ring_element(params: RingParams, tag: &[u8]) -> RingElement {
    let mut rng = seeded_rng(b"bench ring", tag);
    let coeffs: Vec<u64> = (0..params.n()).map(|_| rng.next_u64() % params.q()).collect();
    RingElement::from_coeffs(params, coeffs).unwrap()
}

fn keypair(tag: u64) -> KeyPair {
    let params = GroupParams::default_params();
    let mut rng = seeded_rng(b"bench keys", &tag.to_le_bytes());
    loop {
        let v = rng.next_u64() % params.order;
        if v != 0 {
            return KeyPair::from_private(GroupScalar::new(params, v)).unwrap();
        }
    }
}

fn bench_ring_mul(c: &mut Criterion) {
    let params = RingParams::default_params();
    let a = random_ring_element(params, b"a");
    let b = random_ring_element(params, b"b");
    c.bench_function("ring_mul n=256", |bench| {
        bench.iter(|| ring_mul(black_box(&a), black_box(&b)).unwrap())
    });
}

fn bench_lash(c: &mut Criterion) {
    let mut rng = seeded_rng(b"bench lash", b"input");
    let mut input = vec![0u8; 1024];
    rng.fill_bytes(&mut input);
    c.bench_function("lash_compress 1KiB", |bench| {
        bench.iter(|| lash_compress(black_box(&input)))
    });
}

fn bench_signcryption(c: &mut Criterion) {
    let sender = keypair(0);
    let receivers: Vec<KeyPair> = (1..=19).map(keypair).collect();
    let pubs: Vec<GroupElement> = receivers.iter().map(|k| k.public()).collect();
    let m = Plaintext::new(
        b"batch 12, 40 units, cold chain intact".to_vec(),
        prodchain_core::tagged_digest(0x7f, b"bench"),
        sender.public(),
    )
    .unwrap();
    c.bench_function("signcrypt 19 receivers", |bench| {
        bench.iter(|| signcrypt(black_box(&sender), &pubs, &m, b"bench seed").unwrap())
    });

    let transcript = signcrypt(&sender, &pubs, &m, b"bench seed").unwrap();
    c.bench_function("unsigncrypt 1 of 19", |bench| {
        bench.iter(|| {
            unsigncrypt(0, &receivers[0], &sender.public(), &pubs, black_box(&transcript)).unwrap()
        })
    });
}

fn bench_chain_validate(c: &mut Criterion) {
    let mut chain = Chain::genesis();
    let params = chain.params();
    let payload_bytes = chain.blocks()[0].payload().encode();
    let payload = Ciphertext::decode(params, &payload_bytes).unwrap();
    let wallet = chain
        .register(&ProofMetrics::new(
            DocumentType::TradeLicense,
            b"bench initiator".to_vec(),
            StakeholderRole::Manufacturer,
        ))
        .unwrap()
        .clone();
    for height in 2..60u64 {
        let block = chain.build_block(&wallet, payload.clone(), height).unwrap();
        chain.append(block).unwrap();
    }
    c.bench_function("validate_chain 60 blocks", |bench| {
        bench.iter(|| validate_chain(black_box(&chain)))
    });
}

fn bench_scenario(c: &mut Criterion) {
    let scenario = Scenario::default_scenario();
    c.bench_function("run_scenario 10 blocks", |bench| {
        bench.iter(|| run_scenario(black_box(&scenario)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_ring_mul,
    bench_lash,
    bench_signcryption,
    bench_chain_validate,
    bench_scenario
);
criterion_main!(benches);
