use delta_lab_client::{ClientError, DeltaLabClient};
use delta_lab_core::api::ClassicalRequest;
use delta_lab_core::{analyze, ScattererSet, Scenario};

async fn spawn() -> DeltaLabClient {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let cors = delta_lab_server::cors_layer(None).unwrap();
    tokio::spawn(delta_lab_server::serve(listener, Scenario::example(), cors));
    DeltaLabClient::new(format!("http://{addr}/"))
}

#[tokio::test]
async fn defaults_and_evaluate() {
    let client = spawn().await;
    let scenario = client.defaults().await.unwrap();
    assert_eq!(scenario, Scenario::example());

    let remote = client.evaluate(&scenario).await.unwrap();
    let local = analyze(&scenario, None).unwrap();
    assert_eq!(remote.report, local.report);
    assert_eq!(remote.nonfree_density, local.nonfree.values);
    assert!((remote.rt[0].abs_r2 + remote.rt[0].abs_t2 - 1.0).abs() < 1e-12);
}

#[tokio::test]
async fn classical_and_errors() {
    let client = spawn().await;
    let ok = client
        .classical(&ClassicalRequest {
            mass: 1.0,
            v0: 2.0,
            f0: 1.0,
            w: 2.0,
            x0: 0.0,
        })
        .await
        .unwrap();
    assert!((ok.retardation - 0.343146).abs() < 1e-6);

    let mut scenario = Scenario::example();
    scenario.set = ScattererSet::single(0.0, 2.0);
    scenario.grid.n_points = 1;
    let err = client.evaluate(&scenario).await.unwrap_err();
    assert!(err.is_validation(), "{err}");
    match err {
        ClientError::Api { status, error } => {
            assert_eq!(status, 400);
            assert!(!error.error.is_empty());
        }
        other => panic!("unexpected {other}"),
    }
}

#[tokio::test]
async fn unreachable_service() {
    let client = DeltaLabClient::new("http://127.0.0.1:1");
    let err = client.defaults().await.unwrap_err();
    assert!(matches!(err, ClientError::Transport(_)));
    assert!(!err.is_validation());
}
